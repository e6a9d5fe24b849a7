"""Family-level checks, involution-clique detection, duality and file I/O.

Family files are UTF-8 JSON::

    {"format": "diffiso-family/1", "n": 4, "r": 2,
     "graphs": ["06", "14", ...], "digest": "<sha256>", "meta": {...}}

Each graph is the lowercase hex of its edge bitmask, zero-padded to
``ceil(C(n, r) / 4)`` digits.  Bit ``i`` (least significant first) is the
edge of colex rank ``i``, so ``"01"`` is the edge ``{1, 2}`` and ``"02"``
is ``{1, 3}``.  ``digest`` is the SHA-256 of the format tag, ``n``, ``r``
and the graph strings joined by newlines; ``tool_version`` and ``meta``
are informational and not covered by the digest.
"""

from __future__ import annotations

import hashlib
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .config import INVOLUTION_N_CAP
from .core import (
    EdgeSpace,
    Family,
    Perm,
    edge_space,
    involutions,
    popcount,
)
from .errors import CapacityError, FamilyFormatError, SpaceMismatchError, ValidationError
from .isocanon import CanonCache, prefilter_masks
from .relation import cycle_partition

FORMAT = "diffiso-family/1"
_BLOCK_PAIRS = 1 << 21


@dataclass(frozen=True)
class Witness:
    i: int
    j: int
    diff_ij: int
    diff_ji: int


@dataclass(frozen=True)
class VerifyReport:
    space: EdgeSpace
    ok: bool
    witness: Witness | None
    checked_pairs: int
    elapsed_ms: float

    def to_json(self) -> dict:
        w = None
        if self.witness is not None:
            w = {
                "i": self.witness.i,
                "j": self.witness.j,
                "diff_ij_hex": self.space.mask_hex(self.witness.diff_ij),
                "diff_ji_hex": self.space.mask_hex(self.witness.diff_ji),
            }
        return {
            "ok": self.ok,
            "witness": w,
            "checked_pairs": self.checked_pairs,
            "elapsed_ms": round(self.elapsed_ms, 3),
        }


def _verify_python(family: Family, cache: CanonCache):
    space = family.space
    masks = family.masks
    checked = 0
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            checked += 1
            a = masks[i] & ~masks[j]
            b = masks[j] & ~masks[i]
            if not prefilter_masks(space, a, b) or cache.get(a) != cache.get(b):
                return Witness(i, j, a, b), checked
    return None, checked


def _verify_vectorised(family: Family, cache: CanonCache):
    M = family.masks_array()
    k = len(M)
    rows_per_block = max(1, _BLOCK_PAIRS // max(k, 1))
    checked = 0
    for start in range(0, k, rows_per_block):
        rows = np.arange(start, min(k, start + rows_per_block))
        Mi = M[rows][:, None]
        d_ij = Mi & ~M[None, :]
        d_ji = M[None, :] & ~Mi
        upper = np.arange(k)[None, :] > rows[:, None]
        same = np.bitwise_count(d_ij) == np.bitwise_count(d_ji)
        need = upper & same
        eq = np.zeros_like(upper)
        if need.any():
            eq[need] = cache.get_many(d_ij[need]) == cache.get_many(d_ji[need])
        bad = upper & ~eq
        if bad.any():
            flat = int(np.argmax(bad.ravel()))
            bi, j = divmod(flat, k)
            i = int(rows[bi])
            checked += int(upper[:bi].sum()) + (j - i)
            return Witness(i, j, int(d_ij[bi, j]), int(d_ji[bi, j])), checked
        checked += int(upper.sum())
    return None, checked


def is_difference_isomorphic(family: Family, cache: CanonCache | None = None) -> VerifyReport:
    """Check ``G_i \\ G_j ~ G_j \\ G_i`` for all ``i < j`` in index order.

    Stops at the first failing pair; ``checked_pairs`` counts the pairs
    examined up to and including it.
    """
    t0 = time.perf_counter()
    if cache is None:
        cache = CanonCache(family.space)
    elif cache.space != family.space:
        raise SpaceMismatchError("cache built for a different space")
    if family.space.fits_word and len(family) > 8:
        witness, checked = _verify_vectorised(family, cache)
    else:
        witness, checked = _verify_python(family, cache)
    elapsed = (time.perf_counter() - t0) * 1000
    return VerifyReport(family.space, witness is None, witness, checked, elapsed)


def _bit_matrix(family: Family) -> np.ndarray:
    E = family.space.edge_count
    rows = [[(m >> i) & 1 for i in range(E)] for m in family.masks]
    return np.array(rows, dtype=np.int8).reshape(len(family), E)


def is_psi_clique(family: Family, psi: Perm) -> bool:
    """Members agree on every fixed edge of psi and hold equally many edges
    of every edge 2-cycle of psi."""
    if len(family) <= 1:
        return True
    part = cycle_partition(family.space, psi)
    B = _bit_matrix(family)
    return _clique_test(B, part)


def _clique_test(B: np.ndarray, part) -> bool:
    if part.c1:
        c1 = B[:, list(part.c1)]
        if not (c1 == c1[0]).all():
            return False
    if part.c2:
        e = [p[0] for p in part.c2]
        f = [p[1] for p in part.c2]
        s = B[:, e] + B[:, f]
        if not (s == s[0]).all():
            return False
    return True


def find_involution_clique(family: Family, n_cap: int = INVOLUTION_N_CAP) -> Perm | None:
    """First involution (fewest 2-cycles, then image order) making the family a clique."""
    n = family.space.n
    if n > n_cap:
        raise CapacityError(f"involution enumeration capped at n <= {n_cap}, got n={n}")
    if len(family) <= 1:
        return Perm.identity(n)
    B = _bit_matrix(family)
    for psi in involutions(n):
        if _clique_test(B, cycle_partition(family.space, psi)):
            return psi
    return None


def complement_family(family: Family) -> Family:
    full = family.space.full_mask
    return Family(family.space, tuple(full ^ m for m in family.masks))


def dual_edge_map(space: EdgeSpace) -> tuple[EdgeSpace, tuple[int, ...]]:
    """Target space ``(n, n - r)`` and the rank map ``e -> [n] \\ e``."""
    if space.r == space.n:
        raise ValidationError("dual of r = n would be 0-uniform")
    target = edge_space(space.n, space.n - space.r)
    everything = set(range(1, space.n + 1))
    table = tuple(target.rank(tuple(sorted(everything.difference(e)))) for e in space.edges)
    return target, table


def dualize(family: Family) -> Family:
    target, table = dual_edge_map(family.space)
    out = []
    for m in family.masks:
        img = 0
        i = 0
        while m:
            if m & 1:
                img |= 1 << table[i]
            m >>= 1
            i += 1
        out.append(img)
    return Family(target, tuple(out))


def approximate_bound_ok(family: Family) -> bool | None:
    """``|F| <= n! 2**m`` when every member has ``m`` edges; None if sizes differ."""
    sizes = {popcount(m) for m in family.masks}
    if len(sizes) != 1:
        return None
    (m,) = sizes
    return len(family) <= math.factorial(family.space.n) * 2**m


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------


def family_digest(n: int, r: int, graphs: list[str]) -> str:
    payload = "\n".join([FORMAT, str(n), str(r), *graphs])
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def family_to_json(family: Family, meta: dict | None = None) -> dict:
    graphs = family.hexes()
    doc = {
        "format": FORMAT,
        "tool_version": __version__,
        "n": family.space.n,
        "r": family.space.r,
        "graphs": graphs,
        "digest": family_digest(family.space.n, family.space.r, graphs),
    }
    if meta:
        doc["meta"] = meta
    return doc


def dumps_family(family: Family, meta: dict | None = None) -> str:
    return json.dumps(family_to_json(family, meta), indent=2) + "\n"


def write_family(family: Family, path, meta: dict | None = None) -> None:
    Path(path).write_text(dumps_family(family, meta), encoding="utf-8")


def _line_of(text: str, needle: str, last: bool = False) -> int | None:
    pos = text.rfind(needle) if last else text.find(needle)
    return None if pos < 0 else text.count("\n", 0, pos) + 1


def loads_family(text: str, expect_n: int | None = None, expect_r: int | None = None) -> Family:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FamilyFormatError(exc.msg, line=exc.lineno) from None
    if not isinstance(doc, dict):
        raise FamilyFormatError("top level must be an object", line=1)
    if doc.get("format") != FORMAT:
        raise FamilyFormatError(f"unsupported format {doc.get('format')!r}", _line_of(text, '"format"'))
    n, r, graphs = doc.get("n"), doc.get("r"), doc.get("graphs")
    if not isinstance(n, int) or not isinstance(r, int) or isinstance(n, bool) or isinstance(r, bool):
        raise FamilyFormatError("n and r must be integers", _line_of(text, '"n"'))
    if not 1 <= r <= n:
        raise FamilyFormatError(f"need 1 <= r <= n, got n={n}, r={r}", _line_of(text, '"r"'))
    if expect_n is not None and n != expect_n or expect_r is not None and r != expect_r:
        raise FamilyFormatError(f"file is for (n={n}, r={r}), expected (n={expect_n}, r={expect_r})")
    if not isinstance(graphs, list) or not all(isinstance(g, str) for g in graphs):
        raise FamilyFormatError("graphs must be a list of hex strings", _line_of(text, '"graphs"'))
    try:
        space = edge_space(n, r)
    except (ValidationError, CapacityError) as exc:
        raise FamilyFormatError(str(exc)) from None
    digest = doc.get("digest")
    if digest is not None and digest != family_digest(n, r, graphs):
        raise FamilyFormatError("digest mismatch", _line_of(text, '"digest"'))
    masks = []
    seen = set()
    for g in graphs:
        try:
            m = space.parse_hex(g)
        except ValidationError as exc:
            raise FamilyFormatError(str(exc), _line_of(text, f'"{g}"')) from None
        if m in seen:
            raise FamilyFormatError(f"duplicate member {g}", _line_of(text, f'"{g}"', last=True))
        seen.add(m)
        masks.append(m)
    return Family(space, tuple(masks))


def read_family(path, expect_n: int | None = None, expect_r: int | None = None) -> Family:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise FamilyFormatError(f"not UTF-8: {exc}") from None
    return loads_family(text, expect_n, expect_r)


def read_family_meta(path) -> dict:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return doc.get("meta", {}) if isinstance(doc, dict) else {}
