"""The arrow relation ``G ->phi H`` and the quantities built on it.

``G ->phi H`` means ``phi(G \\ H) = H \\ G``.  Everything here is a pure
function of bitmasks and edge-permutation tables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import enum_cap
from .core import (
    EdgePerm,
    EdgeSpace,
    Family,
    Perm,
    RGraph,
    binom,
    induce_edge_perm,
    iter_bits,
)
from .errors import CapacityError, ContractError, SpaceMismatchError, ValidationError


@dataclass(frozen=True)
class ChoosablePair:
    e_rank: int
    f_rank: int


@dataclass(frozen=True)
class CyclePartition:
    """Fixed edges and 2-cycles of the edge action of an involution."""

    space: EdgeSpace
    c1: tuple[int, ...]
    c2: tuple[tuple[int, int], ...]  # (smaller rank, larger rank), sorted

    @property
    def c1_mask(self) -> int:
        return sum(1 << i for i in self.c1)


@dataclass(frozen=True)
class ExceptionalParams:
    """Thresholds of the exceptional-pair predicate; ``c`` has no known value."""

    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValidationError("c must be positive")


def _check(g: RGraph, ep: EdgePerm) -> None:
    if g.space != ep.space:
        raise SpaceMismatchError(f"graph on {g.space}, permutation on {ep.space}")


def choosable_pairs(g: RGraph, ep: EdgePerm) -> list[ChoosablePair]:
    """Pairs ``(e, phi(e))`` with ``e`` in G and ``phi(e)`` not in G, by ``e`` rank."""
    _check(g, ep)
    bits = g.bits
    out = []
    for i in iter_bits(bits):
        j = ep.table[i]
        if not bits >> j & 1:
            out.append(ChoosablePair(i, j))
    return out


def arrow_masks(ep: EdgePerm, g: int, h: int) -> bool:
    return ep.apply_mask(g & ~h) == h & ~g


def arrow(g: RGraph, h: RGraph, ep: EdgePerm) -> bool:
    _check(g, ep)
    _check(h, ep)
    return arrow_masks(ep, g.bits, h.bits)


def arrow_by_pairs(g: RGraph, h: RGraph, ep: EdgePerm) -> bool:
    """The arrow relation decided through its choosable-pair characterisation."""
    _check(g, ep)
    _check(h, ep)
    paired = 0
    for p in choosable_pairs(g, ep):
        if (h.bits >> p.e_rank & 1) == (h.bits >> p.f_rank & 1):
            return False
        paired |= (1 << p.e_rank) | (1 << p.f_rank)
    return (g.bits ^ h.bits) & ~paired == 0


def neighborhood(g: RGraph, ep: EdgePerm, cap: int | None = None) -> Family:
    """All H with ``g ->phi H``, by binary counter over the choosable pairs.

    Member ``x`` swaps pair ``j`` (takes ``f`` instead of ``e``) when bit
    ``j`` of ``x`` is set, so member 0 is ``g`` itself.
    """
    pairs = choosable_pairs(g, ep)
    m = len(pairs)
    cap = enum_cap() if cap is None else cap
    if (1 << m) > cap:
        raise CapacityError(f"neighborhood has 2**{m} members, cap is {cap}")
    swaps = [(1 << p.e_rank) | (1 << p.f_rank) for p in pairs]
    members = [g.bits]
    for s in swaps:
        members += [x ^ s for x in members]
    return Family(g.space, tuple(members))


def e_psi(family: Family, ep_psi: EdgePerm) -> int:
    """Number of ordered pairs ``(G1, G2)`` of the family with ``G1 ->psi G2``."""
    if len(family) == 0:
        raise ValidationError("e_psi needs a nonempty family")
    if family.space != ep_psi.space:
        raise SpaceMismatchError("family and permutation live in different spaces")
    if family.space.fits_word and len(family) > 16:
        M = family.masks_array()
        total = 0
        for g in M:
            total += int(np.count_nonzero(ep_psi.apply_masks(g & ~M) == (M & ~g)))
        return total
    masks = family.masks
    return sum(arrow_masks(ep_psi, a, b) for a in masks for b in masks)


def cycle_partition(space: EdgeSpace, psi: Perm) -> CyclePartition:
    if not psi.is_involution():
        raise ContractError(f"{psi} is not an involution")
    ep = induce_edge_perm(space, psi)
    c1 = []
    c2 = []
    for i, j in enumerate(ep.table):
        if i == j:
            c1.append(i)
        elif i < j:
            c2.append((i, j))
    return CyclePartition(space, tuple(c1), tuple(c2))


def f_r(n: int, r: int) -> int:
    """Closed-form maximum number of edge 2-cycles of an involution of ``[n]``."""
    if not (isinstance(n, int) and isinstance(r, int)) or not 1 <= r <= n:
        raise ValidationError(f"need 1 <= r <= n, got n={n}, r={r}")
    if r % 2 == 1 and n % 2 == 0:
        twice = binom(n, r)
    else:
        twice = binom(n, r) - binom(n // 2, r // 2)
    if twice % 2:
        raise ArithmeticError(f"odd numerator for f_{r}({n})")
    return twice // 2


def c1_size_formula(a: int, b: int, r: int) -> int:
    """Fixed r-sets of an involution with ``a`` fixed points and ``b`` 2-cycles."""
    if a < 0 or b < 0 or r < 0:
        raise ValidationError("a, b, r must be non-negative")
    return sum(
        binom(a, i) * binom(b, (r - i) // 2)
        for i in range(r % 2, a + 1, 2)
        if i <= r
    )


def good_choosable_pairs(g: RGraph, ep_phi: EdgePerm, ep_psi: EdgePerm) -> list[ChoosablePair]:
    """Choosable pairs of ``(G, phi)`` that also form a 2-cycle of ``psi``."""
    _check(g, ep_psi)
    psi = ep_psi.table
    return [
        p for p in choosable_pairs(g, ep_phi)
        if psi[p.e_rank] == p.f_rank and psi[p.f_rank] == p.e_rank
    ]


def lemma32_bound(m: int, m_g: int) -> float:
    """``4**m_g * 3.9**(m - m_g)``."""
    if not 0 <= m_g <= m:
        raise ValidationError(f"need 0 <= m_g <= m, got m={m}, m_g={m_g}")
    return 4.0**m_g * 3.9 ** (m - m_g)


def lemma32_log_bound(m: int, m_g: int) -> float:
    """Natural log of :func:`lemma32_bound`; never overflows."""
    if not 0 <= m_g <= m:
        raise ValidationError(f"need 0 <= m_g <= m, got m={m}, m_g={m_g}")
    return m_g * math.log(4.0) + (m - m_g) * math.log(3.9)


def shared_two_cycles(phi: Perm, psi: Perm) -> int:
    if phi.n != psi.n:
        raise ValidationError("permutations act on different vertex sets")
    return len(set(phi.two_cycles()) & set(psi.two_cycles()))


def is_exceptional(phi: Perm, psi: Perm, params: ExceptionalParams = ExceptionalParams()) -> bool:
    n = phi.n
    if psi.n != n or not psi.is_involution():
        return False
    root = params.c * math.sqrt(n)
    fixed = psi.fixed_points()
    if len(fixed) > 2 * root:
        return False
    if shared_two_cycles(phi, psi) < n / 2 - root:
        return False
    if any(phi(v) != v for v in fixed):
        return False
    return all(phi(x) == y or phi(y) == x for x, y in psi.two_cycles())
