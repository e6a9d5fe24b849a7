"""Enumeration caps.

``DIFFISO_CAP_BITS`` (expert-only) replaces every power-of-two cap below
with ``2**DIFFISO_CAP_BITS``.
"""

from __future__ import annotations

import os

DEFAULT_ENUM_CAP_BITS = 24  # families and neighborhoods
DEFAULT_COMPAT_CAP_BITS = 15  # compatibility-graph vertices (n=6, r=2)
INVOLUTION_N_CAP = 12
CANON_N_CAP = 10


def _env_bits() -> int | None:
    raw = os.environ.get("DIFFISO_CAP_BITS")
    if raw is None or raw == "":
        return None
    try:
        bits = int(raw)
    except ValueError:
        raise ValueError(f"DIFFISO_CAP_BITS must be an integer, got {raw!r}") from None
    if bits < 0:
        raise ValueError("DIFFISO_CAP_BITS must be non-negative")
    return bits


def enum_cap() -> int:
    bits = _env_bits()
    return 1 << (DEFAULT_ENUM_CAP_BITS if bits is None else bits)


def compat_cap() -> int:
    bits = _env_bits()
    return 1 << (DEFAULT_COMPAT_CAP_BITS if bits is None else bits)
