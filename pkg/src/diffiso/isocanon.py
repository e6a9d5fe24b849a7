"""Exact isomorphism of small r-graphs through memoised canonical forms.

The canonical form of a graph is the smallest bitmask among its images
under all of ``S_n``.  It is computed by a pruned search (see
``_canon_kernel``), compiled for graphs that fit one 64-bit word and
interpreted for wider ones.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _canon_kernel as _k
from .config import CANON_N_CAP
from .core import (
    EdgeSpace,
    Perm,
    RGraph,
    binom,
    degree_sequence,
    induce_edge_perm,
    iter_bits,
    popcount,
)
from .errors import CapacityError, SpaceMismatchError


@dataclass(frozen=True)
class CanonForm:
    space: EdgeSpace
    bits: int

    def hex(self) -> str:
        return self.space.mask_hex(self.bits)

    def graph(self) -> RGraph:
        return RGraph(self.space, self.bits)


@lru_cache(maxsize=None)
def _kernel_args(space: EdgeSpace):
    n, r = space.n, space.r
    # base_tab[T] = colex rank offset of the labels T when they are the top |T| of an edge
    base_tab = np.zeros(1 << n, dtype=np.int64)
    for key in range(1 << n):
        labels = [L for L in range(n) if key >> L & 1]
        s = len(labels)
        if s <= r:
            base_tab[key] = sum(binom(L, r - s + i) for i, L in enumerate(labels, start=1))
    tables = []
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            swap = Perm.from_cycles(n, [(u, v)])
            tables.append(induce_edge_perm(space, swap).table)
    trans = np.array(tables, dtype=np.int64).reshape(len(tables), space.edge_count)
    return n, r, space.edge_count, space.edge_array, base_tab, trans


def _check_capacity(space: EdgeSpace) -> None:
    if space.n > CANON_N_CAP:
        raise CapacityError(f"canonical forms are capped at n <= {CANON_N_CAP}, got n={space.n}")


def _canon_py(space: EdgeSpace, mask: int) -> int:
    """Interpreted twin of ``_canon_kernel.canon_word`` for any edge count."""
    if mask == 0:
        return 0
    n, r = space.n, space.r
    edges = [tuple(v - 1 for v in e) for e in space.edges]
    present = [edges[i] for i in iter_bits(mask)]
    twin = set()
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            ep = induce_edge_perm(space, Perm.from_cycles(n, [(u, v)]))
            if ep.apply_mask(mask) == mask:
                twin.add((u - 1, v - 1))

    def lower_bound(lab):
        known = 0
        groups: dict[int, int] = {}
        for e in present:
            labels = [lab[v] for v in e if lab[v] >= 0]
            if len(labels) == r:
                labels.sort()
                known |= 1 << sum(binom(L, i) for i, L in enumerate(labels, start=1))
            else:
                key = sum(1 << L for L in labels)
                groups[key] = groups.get(key, 0) + 1
        for key, c in groups.items():
            labels = [L for L in range(n) if key >> L & 1]
            s = len(labels)
            base = sum(binom(L, r - s + i) for i, L in enumerate(labels, start=1))
            known |= ((1 << c) - 1) << base
        return known

    best = mask
    lab = [-1] * n

    def search(depth):
        nonlocal best
        label = n - 1 - depth
        children = []
        for v in range(n):
            if lab[v] >= 0:
                continue
            if any(lab[u] < 0 and (u, v) in twin for u in range(v)):
                continue
            lab[v] = label
            lb = lower_bound(lab)
            lab[v] = -1
            if lb < best:
                children.append((lb, v))
        children.sort()
        for lb, v in children:
            if lb >= best:
                break
            if depth == n - 1:
                best = lb
                continue
            lab[v] = label
            search(depth + 1)
            lab[v] = -1

    search(0)
    return best


def canon_mask(space: EdgeSpace, mask: int) -> int:
    """Canonical bitmask of ``mask`` without caching."""
    _check_capacity(space)
    if space.fits_word:
        n, r, E, edges, base_tab, trans = _kernel_args(space)
        return int(_k.canon_word(np.uint64(mask), n, r, E, edges, base_tab, trans))
    return _canon_py(space, mask)


def brute_force_canon(space: EdgeSpace, mask: int) -> int:
    """Reference minimum over every permutation; for tests and tiny n."""
    best = mask
    for image in itertools.permutations(range(1, space.n + 1)):
        best = min(best, induce_edge_perm(space, Perm(image)).apply_mask(mask))
    return best


class CanonCache:
    """Per-space memo ``mask -> canonical mask``.

    Reads are lock-free; insertions take a lock.  Two threads computing
    the same key is harmless since the value is a pure function.
    """

    def __init__(self, space: EdgeSpace):
        _check_capacity(space)
        self.space = space
        self._map: dict[int, int] = {}
        self._lock = threading.Lock()
        self.hits = 0
        self.misses = 0

    def __len__(self):
        return len(self._map)

    def __contains__(self, mask):
        return mask in self._map

    def get(self, mask: int) -> int:
        value = self._map.get(mask)
        if value is not None:
            self.hits += 1
            return value
        self.misses += 1
        value = canon_mask(self.space, mask)
        with self._lock:
            self._map[mask] = value
        return value

    def get_many(self, masks: np.ndarray) -> np.ndarray:
        """Vectorised lookup for a ``uint64`` array (``edge_count <= 64``)."""
        masks = np.asarray(masks, dtype=np.uint64)
        uniq, inverse = np.unique(masks, return_inverse=True)
        values = np.empty_like(uniq)
        missing_idx = []
        lookup = self._map
        for idx, m in enumerate(uniq.tolist()):
            v = lookup.get(m)
            if v is None:
                missing_idx.append(idx)
            else:
                values[idx] = v
        self.hits += len(uniq) - len(missing_idx)
        if missing_idx:
            self.misses += len(missing_idx)
            miss = uniq[np.array(missing_idx, dtype=np.intp)]
            n, r, E, edges, base_tab, trans = _kernel_args(self.space)
            computed = _k.canon_batch(miss, n, r, E, edges, base_tab, trans)
            values[np.array(missing_idx, dtype=np.intp)] = computed
            with self._lock:
                lookup.update(zip(miss.tolist(), computed.tolist()))
        return values[inverse.reshape(-1)].reshape(masks.shape)

    def precompute(self) -> np.ndarray:
        """Fill the cache for every mask of the space by orbit enumeration.

        Returns the table, indexed by mask.
        """
        table = exhaustive_canon_table(self.space)
        with self._lock:
            self._map.update(enumerate(table.tolist()))
        return table


def exhaustive_canon_table(space: EdgeSpace) -> np.ndarray:
    """``table[mask]`` for all ``2**edge_count`` masks.

    Scanning masks upward, the first mask not yet reached is the minimum of
    its orbit; the whole orbit is then labelled with it.  This route shares
    no code with the pruned search, which makes it a useful cross-check.
    """
    _check_capacity(space)
    E = space.edge_count
    if E > 24:
        raise CapacityError(f"exhaustive canon table needs 2**{E} entries")
    perm_tables = np.array(
        [induce_edge_perm(space, Perm(p)).table for p in itertools.permutations(range(1, space.n + 1))],
        dtype=np.int64,
    ).reshape(-1, E)
    return _k.orbit_min_table(1 << E, perm_tables, E)


def canon(g: RGraph, cache: CanonCache | None = None) -> CanonForm:
    if cache is None:
        return CanonForm(g.space, canon_mask(g.space, g.bits))
    if cache.space != g.space:
        raise SpaceMismatchError("cache built for a different space")
    return CanonForm(g.space, cache.get(g.bits))


def prefilter_masks(space: EdgeSpace, m1: int, m2: int) -> bool:
    if popcount(m1) != popcount(m2):
        return False
    return degree_sequence(space, m1) == degree_sequence(space, m2)


def prefilter(g1: RGraph, g2: RGraph) -> bool:
    """False only when the two graphs are provably non-isomorphic."""
    if g1.space != g2.space:
        raise SpaceMismatchError(f"{g1.space} vs {g2.space}")
    return prefilter_masks(g1.space, g1.bits, g2.bits)


def are_isomorphic(g1: RGraph, g2: RGraph, cache: CanonCache | None = None) -> bool:
    if g1.space != g2.space:
        raise SpaceMismatchError(f"{g1.space} vs {g2.space}")
    if not prefilter(g1, g2):
        return False
    return canon(g1, cache).bits == canon(g2, cache).bits


def find_isomorphism(g1: RGraph, g2: RGraph) -> Perm | None:
    """Direct search for ``p`` with ``p(g1) = g2`` (independent of canon)."""
    if g1.space != g2.space:
        raise SpaceMismatchError(f"{g1.space} vs {g2.space}")
    if popcount(g1.bits) != popcount(g2.bits):
        return None
    for image in itertools.permutations(range(1, g1.space.n + 1)):
        p = Perm(image)
        if induce_edge_perm(g1.space, p).apply_mask(g1.bits) == g2.bits:
            return p
    return None
