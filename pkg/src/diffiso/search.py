"""Largest difference-isomorphic families by maximum clique search.

Vertices of the compatibility graph are r-graphs; two are adjacent when
their two differences are isomorphic.  A clique is then exactly a
difference-isomorphic family.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .config import compat_cap
from .constructions import extremal_family
from .core import EdgeSpace, Family, edge_space
from .errors import CapacityError, ValidationError
from .family import is_difference_isomorphic
from .isocanon import CanonCache

DEFAULT_BUDGET = 60.0
_ROW_BLOCK = 1 << 22


@dataclass
class CompatGraph:
    space: EdgeSpace
    vertex_masks: np.ndarray  # uint64, one per vertex
    rows: np.ndarray  # packed adjacency bit-rows, little bit order

    def __len__(self):
        return len(self.vertex_masks)

    def adjacent(self, i: int, j: int) -> bool:
        return bool(self.rows[i, j >> 3] >> (j & 7) & 1)

    def row(self, i: int) -> np.ndarray:
        return np.unpackbits(self.rows[i], count=len(self), bitorder="little").astype(bool)

    def degrees(self) -> np.ndarray:
        return np.bitwise_count(self.rows).sum(axis=1, dtype=np.int64)


def build_compat(
    n: int,
    r: int,
    cache: CanonCache | None = None,
    masks=None,
    cap: int | None = None,
) -> CompatGraph:
    """Compatibility graph on every r-graph of ``[n]`` or on ``masks``."""
    space = edge_space(n, r)
    cap = compat_cap() if cap is None else cap
    if masks is None:
        if space.edge_count >= 63 or (1 << space.edge_count) > cap:
            raise CapacityError(f"2**{space.edge_count} vertices exceed the cap of {cap}")
        M = np.arange(1 << space.edge_count, dtype=np.uint64)
    else:
        if not space.fits_word:
            raise CapacityError("compatibility graphs need C(n, r) <= 64")
        M = np.array([int(m) for m in masks], dtype=np.uint64)
        if len(M) > cap:
            raise CapacityError(f"{len(M)} vertices exceed the cap of {cap}")
        if len(np.unique(M)) != len(M):
            raise ValidationError("duplicate vertex masks")
        if len(M) and int(M.max()) > space.full_mask:
            raise ValidationError("vertex mask outside the edge space")
    cache = CanonCache(space) if cache is None else cache
    table = cache.precompute() if space.edge_count <= 24 else None

    k = len(M)
    rows = np.zeros((k, (k + 7) // 8), dtype=np.uint8)
    step = max(1, _ROW_BLOCK // max(k, 1))
    for start in range(0, k, step):
        stop = min(k, start + step)
        Mi = M[start:stop, None]
        d1 = Mi & ~M[None, :]
        d2 = M[None, :] & ~Mi
        if table is not None:
            adj = table[d1] == table[d2]
        else:
            adj = cache.get_many(d1) == cache.get_many(d2)
        adj[np.arange(stop - start), np.arange(start, stop)] = False
        rows[start:stop] = np.packbits(adj, axis=1, bitorder="little")
    return CompatGraph(space, M, rows)


@dataclass(frozen=True)
class SearchResult:
    best_family: Family
    size: int
    exact: bool
    nodes_explored: int
    elapsed: float  # seconds

    def to_json(self) -> dict:
        return {
            "n": self.best_family.space.n,
            "r": self.best_family.space.r,
            "size": self.size,
            "exact": self.exact,
            "nodes_explored": self.nodes_explored,
            "elapsed_ms": round(self.elapsed * 1000, 3),
            "family": self.best_family.hexes(),
        }


def degeneracy_order(cg: CompatGraph) -> list[int]:
    """Vertices in the order they are peeled off by minimum degree.

    Ties go to the smaller mask.
    """
    k = len(cg)
    deg = cg.degrees()
    mask_rank = np.empty(k, dtype=np.int64)
    mask_rank[np.argsort(cg.vertex_masks, kind="stable")] = np.arange(k)
    alive = np.ones(k, dtype=bool)
    big = np.iinfo(np.int64).max
    order = []
    for _ in range(k):
        key = np.where(alive, deg * k + mask_rank, big)
        v = int(np.argmin(key))
        order.append(v)
        alive[v] = False
        nbrs = cg.row(v) & alive
        deg[nbrs] -= 1
    return order


class _OutOfTime(Exception):
    pass


def max_clique(
    cg: CompatGraph,
    budget: float = DEFAULT_BUDGET,
    seed_family: Family | None = None,
) -> SearchResult:
    """Branch and bound with greedy-colouring bounds.

    Vertices are relabelled so that the last one peeled in the degeneracy
    order gets bit 0; colouring always takes the lowest bit first.  When
    the budget runs out the best clique so far is returned with
    ``exact=False``.
    """
    t0 = time.perf_counter()
    deadline = t0 + budget
    k = len(cg)
    if k == 0:
        raise ValidationError("empty compatibility graph")
    order = degeneracy_order(cg)[::-1]  # new label -> old vertex
    adj = []
    for old in order:
        bits = cg.row(old)[order]
        adj.append(int.from_bytes(np.packbits(bits, bitorder="little").tobytes(), "little"))

    best = [0]  # best clique as new labels
    if seed_family is not None:
        if seed_family.space != cg.space:
            raise ValidationError("seed family lives in a different space")
        pos = {int(m): i for i, m in enumerate(cg.vertex_masks)}
        new_of_old = {old: new for new, old in enumerate(order)}
        seed = [new_of_old[pos[m]] for m in seed_family.masks if m in pos]
        for a in seed:
            for b in seed:
                if a != b and not adj[a] >> b & 1:
                    raise ValidationError("seed family is not a clique of the compatibility graph")
        if len(seed) > len(best):
            best = seed

    nodes = 0
    clique: list[int] = []

    def expand(P: int):
        nonlocal nodes, best
        nodes += 1
        if time.perf_counter() > deadline:
            raise _OutOfTime
        verts = []
        colours = []
        Q = P
        c = 0
        while Q:
            c += 1
            avail = Q
            while avail:
                low = avail & -avail
                v = low.bit_length() - 1
                avail &= ~low & ~adj[v]
                Q &= ~low
                verts.append(v)
                colours.append(c)
        for idx in range(len(verts) - 1, -1, -1):
            if len(clique) + colours[idx] <= len(best):
                return
            v = verts[idx]
            clique.append(v)
            NP = P & adj[v]
            if NP:
                expand(NP)
            elif len(clique) > len(best):
                best = list(clique)
            clique.pop()
            P &= ~(1 << v)

    exact = True
    try:
        expand((1 << k) - 1)
    except _OutOfTime:
        exact = False
    masks = sorted(int(cg.vertex_masks[order[v]]) for v in best)
    fam = Family(cg.space, tuple(masks))
    return SearchResult(fam, len(fam), exact, nodes, time.perf_counter() - t0)


def seeded_lower_bound(n: int, r: int) -> Family:
    return extremal_family(n, r)[0]


def search(
    n: int,
    r: int,
    budget: float = DEFAULT_BUDGET,
    seed_extremal: bool = False,
    cache: CanonCache | None = None,
) -> SearchResult:
    """Build the compatibility graph and run :func:`max_clique` under one budget."""
    t0 = time.perf_counter()
    cg = build_compat(n, r, cache)
    seed = seeded_lower_bound(n, r) if seed_extremal else None
    remaining = max(0.0, budget - (time.perf_counter() - t0))
    res = max_clique(cg, remaining, seed)
    report = is_difference_isomorphic(res.best_family)
    if not report.ok:
        raise AssertionError(f"search returned a non difference-isomorphic family: {report.witness}")
    return SearchResult(res.best_family, res.size, res.exact, res.nodes_explored, time.perf_counter() - t0)


@dataclass(frozen=True)
class DualityReport:
    n: int
    r: int
    size: int
    exact: bool
    dual_size: int
    dual_exact: bool

    @property
    def match(self) -> bool | None:
        """None unless both searches finished."""
        if not (self.exact and self.dual_exact):
            return None
        return self.size == self.dual_size

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "r": self.r,
            "size": self.size,
            "exact": self.exact,
            "dual_r": self.n - self.r,
            "dual_size": self.dual_size,
            "dual_exact": self.dual_exact,
        }
        if self.match is not None:
            out["match"] = self.match
        return out


def duality_check(n: int, r: int, budget: float = DEFAULT_BUDGET) -> DualityReport:
    """Search ``(n, r)`` and ``(n, n - r)``, each with its own budget."""
    if not 1 <= r < n:
        raise ValidationError(f"need 1 <= r < n, got n={n}, r={r}")
    a = search(n, r, budget)
    b = search(n, n - r, budget)
    return DualityReport(n, r, a.size, a.exact, b.size, b.exact)
