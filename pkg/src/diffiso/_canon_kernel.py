"""Compiled minimum-image search for graphs that fit one 64-bit word.

The search labels vertices from the top label ``n-1`` downwards.  Edges of
the image whose labels are all assigned are known exactly.  Every other
present edge is grouped by the set ``T`` of labels it already carries; the
``c`` edges of a group will occupy ``c`` distinct completions by labels
below the assigned range, and the cheapest such completions are the ``c``
colex-smallest ones, whose bits are ``base(T) .. base(T)+c-1``.  The sum of
known bits and these blocks is therefore a valid lower bound on any
completion, and a node is cut as soon as the bound reaches the best image
found so far.  Interchangeable vertices (the transposition is an
automorphism) are branched on only once per node.
"""

import numba
import numpy as np
from numba import njit, prange

# the bundled TBB is often too old; workqueue is always available
numba.config.THREADING_LAYER = "workqueue"

_ONE = np.uint64(1)


@njit(cache=True)
def _apply(mask, table, E):
    out = np.uint64(0)
    for i in range(E):
        if (mask >> np.uint64(i)) & _ONE:
            out |= _ONE << np.uint64(table[i])
    return out


@njit(cache=True)
def _block(key, c, base_tab):
    if c <= 0:
        return np.uint64(0)
    if c >= 64:
        return ~np.uint64(0)
    return ((_ONE << np.uint64(c)) - _ONE) << np.uint64(base_tab[key])


@njit(cache=True)
def _move(lb, e, new_key, edge_key, cnt, base_tab):
    """Move present edge ``e`` to group ``new_key``, updating the bound."""
    k0 = edge_key[e]
    c0 = cnt[k0]
    lb ^= _block(k0, c0, base_tab) ^ _block(k0, c0 - 1, base_tab)
    cnt[k0] = c0 - 1
    c1 = cnt[new_key]
    lb ^= _block(new_key, c1, base_tab) ^ _block(new_key, c1 + 1, base_tab)
    cnt[new_key] = c1 + 1
    edge_key[e] = new_key
    return lb


@njit(cache=True)
def _assign(lb, v, label, inc, ninc, edge_key, cnt, base_tab):
    bit = 1 << label
    for t in range(ninc[v]):
        e = inc[v, t]
        lb = _move(lb, e, edge_key[e] | bit, edge_key, cnt, base_tab)
    return lb


@njit(cache=True)
def _unassign(lb, v, label, inc, ninc, edge_key, cnt, base_tab):
    bit = 1 << label
    for t in range(ninc[v]):
        e = inc[v, t]
        lb = _move(lb, e, edge_key[e] & ~bit, edge_key, cnt, base_tab)
    return lb


@njit(cache=True)
def canon_word(mask, n, r, E, edges, base_tab, transpositions):
    best = mask
    if mask == np.uint64(0):
        return best
    twin = np.zeros((n, n), dtype=np.bool_)
    t = 0
    for u in range(n):
        for v in range(u + 1, n):
            if _apply(mask, transpositions[t], E) == mask:
                twin[u, v] = True
            t += 1

    # present edges, indexed 0..P-1, with per-vertex incidence lists
    P = 0
    inc = np.zeros((n, E), dtype=np.int64)
    ninc = np.zeros(n, dtype=np.int64)
    for i in range(E):
        if (mask >> np.uint64(i)) & _ONE:
            for j in range(r):
                v = edges[i, j]
                inc[v, ninc[v]] = P
                ninc[v] += 1
            P += 1
    edge_key = np.zeros(P, dtype=np.int64)
    cnt = np.zeros(1 << n, dtype=np.int64)
    cnt[0] = P
    lb = _block(0, P, base_tab)

    lab = -np.ones(n, dtype=np.int64)
    cand = np.zeros((n, n), dtype=np.int64)
    cand_lb = np.zeros((n, n), dtype=np.uint64)
    ncand = np.zeros(n, dtype=np.int64)
    pos = np.zeros(n, dtype=np.int64)
    chosen = np.zeros(n, dtype=np.int64)

    d = 0
    while True:
        # expand depth d: children = choices of the vertex receiving label n-1-d
        label = n - 1 - d
        k = 0
        for v in range(n):
            if lab[v] >= 0:
                continue
            dup = False
            for u in range(v):
                if lab[u] < 0 and twin[u, v]:
                    dup = True
                    break
            if dup:
                continue
            child = _assign(lb, v, label, inc, ninc, edge_key, cnt, base_tab)
            lb = _unassign(child, v, label, inc, ninc, edge_key, cnt, base_tab)
            if child < best:
                p = k
                while p > 0 and cand_lb[d, p - 1] > child:
                    cand[d, p] = cand[d, p - 1]
                    cand_lb[d, p] = cand_lb[d, p - 1]
                    p -= 1
                cand[d, p] = v
                cand_lb[d, p] = child
                k += 1
        ncand[d] = k
        pos[d] = 0

        # advance to the next live child, backtracking as needed
        descended = False
        while d >= 0:
            if pos[d] < ncand[d]:
                v = cand[d, pos[d]]
                child = cand_lb[d, pos[d]]
                pos[d] += 1
                if child >= best:
                    pos[d] = ncand[d]
                    continue
                if d == n - 1:
                    best = child
                    continue
                lb = _assign(lb, v, n - 1 - d, inc, ninc, edge_key, cnt, base_tab)
                lab[v] = n - 1 - d
                chosen[d] = v
                d += 1
                descended = True
                break
            d -= 1
            if d >= 0:
                v = chosen[d]
                lb = _unassign(lb, v, n - 1 - d, inc, ninc, edge_key, cnt, base_tab)
                lab[v] = -1
        if not descended:
            return best


@njit(cache=True, parallel=True)
def canon_batch(masks, n, r, E, edges, base_tab, transpositions):
    out = np.empty_like(masks)
    for i in prange(masks.shape[0]):
        out[i] = canon_word(masks[i], n, r, E, edges, base_tab, transpositions)
    return out


@njit(cache=True)
def orbit_min_table(n_masks, perm_tables, E):
    """Exhaustive canon table: ascending scan, first unseen mask is its orbit minimum."""
    table = np.zeros(n_masks, dtype=np.uint64)
    seen = np.zeros(n_masks, dtype=np.bool_)
    for m in range(n_masks):
        if seen[m]:
            continue
        mm = np.uint64(m)
        for p in range(perm_tables.shape[0]):
            img = _apply(mm, perm_tables[p], E)
            if not seen[img]:
                seen[img] = True
                table[img] = mm
    return table
