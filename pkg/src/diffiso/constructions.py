"""Generators for the explicit difference-isomorphic families.

Every generator returns members in a fixed documented order so that
family files are reproducible byte for byte.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb, factorial

from .config import enum_cap
from .core import (
    Family,
    Perm,
    RGraph,
    canonical_involution,
    edge_space,
    induce_edge_perm,
)
from .errors import CapacityError, DegenerateConstructionError, ValidationError
from .relation import cycle_partition, f_r

KINDS = ("extremal", "matchings", "stars", "middle_layer", "layer", "appendix")


def _require_cap(count: int, what: str, cap: int | None = None) -> None:
    cap = enum_cap() if cap is None else cap
    if count > cap:
        raise CapacityError(f"{what} has {count} members, cap is {cap}")


def _binary_counter(base: int, swaps: list[int]) -> tuple[int, ...]:
    # member x has swap j applied iff bit j of x is set
    members = [base]
    for s in swaps:
        members += [m ^ s for m in members]
    return tuple(members)


def extremal_family(n: int, r: int, cap: int | None = None) -> tuple[Family, Perm]:
    """All graphs with exactly one edge from each 2-cycle of ``psi = (1 2)(3 4)...``.

    Members follow a binary counter over the 2-cycles sorted by their smaller
    rank: bit ``j`` clear picks the smaller-rank edge of pair ``j``.
    """
    space = edge_space(n, r)
    psi = canonical_involution(n)
    part = cycle_partition(space, psi)
    if len(part.c2) != f_r(n, r):
        raise AssertionError(f"|C2| = {len(part.c2)} but f_{r}({n}) = {f_r(n, r)}")
    _require_cap(1 << len(part.c2), f"extremal_family({n}, {r})", cap)
    base = sum(1 << e for e, _ in part.c2)
    swaps = [(1 << e) | (1 << f) for e, f in part.c2]
    return Family(space, _binary_counter(base, swaps)), psi


def _perfect_matchings(points: tuple[int, ...]):
    if not points:
        yield ()
        return
    first = points[0]
    for idx in range(1, len(points)):
        rest = points[1:idx] + points[idx + 1 :]
        for m in _perfect_matchings(rest):
            yield ((first, points[idx]),) + m


def perfect_matchings_family(n: int, cap: int | None = None) -> Family:
    if n < 2 or n % 2:
        raise ValidationError(f"perfect matchings need an even n >= 2, got {n}")
    count = 1
    for k in range(n - 1, 0, -2):
        count *= k
    _require_cap(count, f"perfect_matchings_family({n})", cap)
    space = edge_space(n, 2)
    return Family.from_graphs(
        (RGraph.from_edges(space, m) for m in _perfect_matchings(tuple(range(1, n + 1)))),
        space,
    )


def _labeled_blocks(pool: tuple[int, ...], k: int, size: int):
    if k == 0:
        yield ()
        return
    for block in itertools.combinations(pool, size):
        rest = tuple(v for v in pool if v not in block)
        for tail in _labeled_blocks(rest, k - 1, size):
            yield (block,) + tail


def star_family(n: int, k: int, cap: int | None = None) -> Family:
    """Disjoint stars: centers ``1..k``, each with ``n/k - 1`` leaves from ``k+1..n``."""
    if k < 1 or n < 2 or n % k:
        raise ValidationError(f"star_family needs k | n with k >= 1, n >= 2 (n={n}, k={k})")
    leaves = n // k - 1
    count = factorial(n - k) // factorial(leaves) ** k
    _require_cap(count, f"star_family({n}, {k})", cap)
    space = edge_space(n, 2)
    B = tuple(range(k + 1, n + 1))
    graphs = []
    for blocks in _labeled_blocks(B, k, leaves):
        graphs.append(
            RGraph.from_edges(space, [(c, b) for c, block in enumerate(blocks, start=1) for b in block])
        )
    return Family.from_graphs(graphs, space)


def layer_family(n: int, r: int, m: int, cap: int | None = None) -> Family:
    """Every r-graph on ``[n]`` with exactly ``m`` edges, in lex order of rank tuples."""
    space = edge_space(n, r)
    E = space.edge_count
    if not 0 <= m <= E:
        raise ValidationError(f"need 0 <= m <= {E}, got m={m}")
    _require_cap(comb(E, m), f"layer_family({n}, {r}, {m})", cap)
    return Family(space, tuple(sum(1 << i for i in c) for c in itertools.combinations(range(E), m)))


def middle_layer_family(r: int, cap: int | None = None) -> Family:
    """All r-graphs on ``[r+1]`` with ``floor((r+1)/2)`` edges."""
    if r < 1:
        raise ValidationError("r must be >= 1")
    return layer_family(r + 1, r, (r + 1) // 2, cap)


def appendix_involutions(n: int) -> tuple[Perm, Perm]:
    """``psi`` pairs ``2i-1, 2i`` for ``i <= floor((n-1)/2)``; ``phi`` is the
    4-cycle ``1->2->3->4->1`` and agrees with ``psi`` from 5 on."""
    half = (n - 1) // 2
    psi = Perm.from_cycles(n, [(2 * i - 1, 2 * i) for i in range(1, half + 1)])
    image = list(psi.image)
    image[0:4] = [2, 3, 4, 1]
    return psi, Perm(tuple(image))


def appendix_family(n: int, r: int, cap: int | None = None) -> tuple[Family, Perm, Perm, RGraph]:
    """A difference-isomorphic family that is not an involution clique.

    Returns ``(family, psi, phi, G0)``; the family lists the psi-clique
    ``G'`` (binary counter over the free 2-cycles inside ``{5..n}``, sorted
    by smaller rank) followed by ``G0``.  Every edge is classified by how
    many of its vertices lie in ``{1, 2, 3, 4}``:

    * none: a 2-cycle of psi is a free choice in ``G'`` (``G0`` takes the
      smaller rank); fixed edges are absent;
    * exactly one: always in a 2-cycle ``{e, psi(e)}`` of psi; ``G0`` holds
      the side meeting ``{1, 3}`` and every member of ``G'`` holds the other
      side, which is also its phi-image;
    * two or more: only ``e0`` is present in ``G0``, only ``f0 = phi(e0)``
      in the members of ``G'``.

    An edge meeting ``{1..4}`` once is placed by that vertex alone, whatever
    fixed points of psi it also contains.
    """
    if r < 2:
        raise ValidationError("appendix_family needs r >= 2")
    if n < r + 4:
        raise ValidationError(f"appendix_family needs n >= r + 4, got n={n}, r={r}")
    space = edge_space(n, r)
    psi, phi = appendix_involutions(n)
    ep_psi = induce_edge_perm(space, psi)
    ep_phi = induce_edge_perm(space, phi)
    if r % 2 == 0:
        e0 = tuple(range(3, r + 3))
    else:
        e0 = tuple(range(3, r + 2)) + (n,)
    e0_rank = space.rank(e0)
    f0_rank = ep_phi(e0_rank)
    if ep_psi(e0_rank) != e0_rank:
        raise AssertionError("e0 must be fixed by psi")

    g0_side = 0  # edges meeting {1..4} exactly once
    g_side = 0
    g0_free = 0
    free_swaps = []
    low = {1, 2, 3, 4}
    for i, e in enumerate(space.edges):
        inter = low.intersection(e)
        if not inter:
            j = ep_psi(i)
            if j > i:
                free_swaps.append((1 << i) | (1 << j))
                g0_free |= 1 << i
        elif len(inter) == 1:
            if inter & {1, 3}:
                g0_side |= 1 << i
            else:
                g_side |= 1 << i
    if len(free_swaps) == 0:
        raise DegenerateConstructionError(
            f"appendix_family({n}, {r}) has no free 2-cycles inside {{5..n}}: |G'| = 1"
        )
    _require_cap((1 << len(free_swaps)) + 1, f"appendix_family({n}, {r})", cap)
    g0 = g0_side | g0_free | (1 << e0_rank)
    base = g_side | g0_free | (1 << f0_rank)
    members = _binary_counter(base, free_swaps) + (g0,)
    return Family(space, members), psi, phi, RGraph(space, g0)


@dataclass(frozen=True)
class ConstructionSpec:
    kind: str
    n: int | None = None
    r: int | None = None
    extra: dict = field(default_factory=dict)  # k for stars, m for layer

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValidationError(f"unknown construction kind {self.kind!r}; choose from {KINDS}")


def construct(spec: ConstructionSpec, cap: int | None = None) -> Family:
    """Dispatch a :class:`ConstructionSpec` to its generator; returns the family only."""
    kind, n, r, extra = spec.kind, spec.n, spec.r, spec.extra

    def need(name, value):
        if value is None:
            raise ValidationError(f"construction {kind!r} needs {name}")
        return value

    if kind == "extremal":
        return extremal_family(need("n", n), need("r", r), cap)[0]
    if kind == "matchings":
        return perfect_matchings_family(need("n", n), cap)
    if kind == "stars":
        return star_family(need("n", n), need("k", extra.get("k")), cap)
    if kind == "middle_layer":
        return middle_layer_family(need("r", r), cap)
    if kind == "layer":
        return layer_family(need("n", n), need("r", r), need("m", extra.get("m")), cap)
    return appendix_family(need("n", n), need("r", r), cap)[0]

