"""Ranked edge spaces, bitmask r-graphs and vertex permutations.

Edges of the complete r-graph on ``[n]`` are numbered by colexicographic
rank, so an r-graph is simply an integer whose bit ``i`` says whether the
edge of rank ``i`` is present.  Vertices are 1-based; ranks are 0-based.
Python integers are unbounded, so masks wider than one machine word need
no special handling here; the vectorised helpers (``*_masks``) require
``edge_count <= 64`` and work on ``numpy.uint64`` arrays.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CapacityError, SpaceMismatchError, ValidationError

MAX_BINOM_N = 64


def _pascal(limit: int) -> tuple[tuple[int, ...], ...]:
    rows = [(1,)]
    for _ in range(limit):
        prev = rows[-1]
        rows.append((1,) + tuple(prev[k - 1] + prev[k] for k in range(1, len(prev))) + (1,))
    return tuple(rows)


_PASCAL = _pascal(MAX_BINOM_N)


def binom(n: int, k: int) -> int:
    """Binomial coefficient from the process-wide Pascal table (0 outside range)."""
    if n > MAX_BINOM_N:
        raise CapacityError(f"binomial table only covers n <= {MAX_BINOM_N}, got n={n}")
    if k < 0 or n < 0 or k > n:
        return 0
    return _PASCAL[n][k]


def binom_table(n_max: int, k_max: int) -> np.ndarray:
    """``int64`` array ``T[a, b] = C(a, b)`` for ``0 <= a <= n_max, 0 <= b <= k_max``."""
    out = np.zeros((n_max + 1, k_max + 1), dtype=np.int64)
    for a in range(n_max + 1):
        for b in range(k_max + 1):
            out[a, b] = binom(a, b)
    return out


def popcount(x: int) -> int:
    return x.bit_count()


def iter_bits(x: int) -> Iterator[int]:
    """Indices of the set bits of ``x``, ascending."""
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


# ---------------------------------------------------------------------------
# Edge space
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgeSpace:
    """All r-subsets of ``[n]``, ordered colexicographically."""

    n: int
    r: int

    def __post_init__(self):
        if not isinstance(self.n, int) or not isinstance(self.r, int):
            raise ValidationError("n and r must be integers")
        if self.n < 1 or not 1 <= self.r <= self.n:
            raise ValidationError(f"need 1 <= r <= n, got n={self.n}, r={self.r}")
        if self.n > MAX_BINOM_N:
            raise CapacityError(f"n={self.n} exceeds the binomial table (n <= {MAX_BINOM_N})")

    @property
    def edge_count(self) -> int:
        return binom(self.n, self.r)

    @cached_property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        combos = itertools.combinations(range(1, self.n + 1), self.r)
        return tuple(sorted(combos, key=lambda e: e[::-1]))

    @cached_property
    def _rank_of(self) -> dict[tuple[int, ...], int]:
        return {e: i for i, e in enumerate(self.edges)}

    @property
    def full_mask(self) -> int:
        return (1 << self.edge_count) - 1

    @property
    def fits_word(self) -> bool:
        return self.edge_count <= 64

    def check_edge(self, e: Sequence[int]) -> tuple[int, ...]:
        e = tuple(e)
        if len(e) != self.r:
            raise ValidationError(f"edge {e} has size {len(e)}, expected r={self.r}")
        if any(not isinstance(v, (int, np.integer)) for v in e):
            raise ValidationError(f"edge {e} has non-integer vertices")
        if any(e[i] >= e[i + 1] for i in range(len(e) - 1)):
            raise ValidationError(f"edge {e} is not strictly increasing")
        if e[0] < 1 or e[-1] > self.n:
            raise ValidationError(f"edge {e} leaves the vertex range [1, {self.n}]")
        return tuple(int(v) for v in e)

    def rank(self, e: Sequence[int]) -> int:
        e = self.check_edge(e)
        return sum(binom(s - 1, i) for i, s in enumerate(e, start=1))

    def unrank(self, i: int) -> tuple[int, ...]:
        if not 0 <= i < self.edge_count:
            raise ValidationError(f"rank {i} out of range [0, {self.edge_count})")
        out = []
        # greedy colex unranking: largest element first
        for pos in range(self.r, 0, -1):
            s = pos
            while binom(s, pos) <= i:
                s += 1
            out.append(s)  # element value s, since C(s-1, pos) <= i < C(s, pos)
            i -= binom(s - 1, pos)
        return tuple(reversed(out))

    @cached_property
    def vertex_masks(self) -> tuple[int, ...]:
        """``vertex_masks[v-1]`` = mask of the edges containing vertex ``v``."""
        masks = [0] * self.n
        for i, e in enumerate(self.edges):
            for v in e:
                masks[v - 1] |= 1 << i
        return tuple(masks)

    @cached_property
    def edge_array(self) -> np.ndarray:
        """``(edge_count, r)`` int64 array of 0-based vertex ids in rank order."""
        return np.array(self.edges, dtype=np.int64).reshape(self.edge_count, self.r) - 1

    def mask_hex(self, mask: int) -> str:
        width = max(1, (self.edge_count + 3) // 4)
        return format(mask, f"0{width}x")

    def parse_hex(self, text: str) -> int:
        try:
            mask = int(text, 16)
        except (TypeError, ValueError):
            raise ValidationError(f"not a hex bitmask: {text!r}") from None
        if mask < 0 or mask >> self.edge_count:
            raise ValidationError(f"mask {text} has bits beyond edge_count={self.edge_count}")
        return mask


@lru_cache(maxsize=None)
def edge_space(n: int, r: int) -> EdgeSpace:
    """Interned :class:`EdgeSpace`, so cached tables are shared."""
    return EdgeSpace(n, r)


def rank_edge(space: EdgeSpace, e: Sequence[int]) -> int:
    return space.rank(e)


def unrank_edge(space: EdgeSpace, i: int) -> tuple[int, ...]:
    return space.unrank(i)


# ---------------------------------------------------------------------------
# r-graphs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RGraph:
    space: EdgeSpace
    bits: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >> self.space.edge_count:
            raise ValidationError("bits set beyond edge_count")

    @classmethod
    def from_edges(cls, space: EdgeSpace, edges: Iterable[Sequence[int]]) -> "RGraph":
        bits = 0
        for e in edges:
            bits |= 1 << space.rank(tuple(sorted(e)))
        return cls(space, bits)

    @classmethod
    def empty(cls, space: EdgeSpace) -> "RGraph":
        return cls(space, 0)

    @classmethod
    def full(cls, space: EdgeSpace) -> "RGraph":
        return cls(space, space.full_mask)

    @classmethod
    def from_hex(cls, space: EdgeSpace, text: str) -> "RGraph":
        return cls(space, space.parse_hex(text))

    def edges(self) -> list[tuple[int, ...]]:
        return [self.space.edges[i] for i in iter_bits(self.bits)]

    def hex(self) -> str:
        return self.space.mask_hex(self.bits)

    def __len__(self) -> int:
        return popcount(self.bits)

    def __contains__(self, e) -> bool:
        return bool(self.bits >> self.space.rank(e) & 1)

    def _other(self, other: "RGraph") -> int:
        if not isinstance(other, RGraph):
            return NotImplemented
        if other.space != self.space:
            raise SpaceMismatchError(f"{self.space} vs {other.space}")
        return other.bits

    def __sub__(self, other):
        return RGraph(self.space, self.bits & ~self._other(other))

    def __xor__(self, other):
        return RGraph(self.space, self.bits ^ self._other(other))

    def __and__(self, other):
        return RGraph(self.space, self.bits & self._other(other))

    def __or__(self, other):
        return RGraph(self.space, self.bits | self._other(other))

    def __invert__(self):
        return RGraph(self.space, self.space.full_mask ^ self.bits)

    def __repr__(self):
        body = ",".join("".join(map(str, e)) if self.space.n < 10 else str(e) for e in self.edges())
        return f"RGraph(n={self.space.n}, r={self.space.r}, {{{body}}})"


def _same_space(g1: RGraph, g2: RGraph) -> None:
    if g1.space != g2.space:
        raise SpaceMismatchError(f"{g1.space} vs {g2.space}")


def difference(g1: RGraph, g2: RGraph) -> RGraph:
    return g1 - g2


def symmetric_difference(g1: RGraph, g2: RGraph) -> RGraph:
    return g1 ^ g2


def complement(g: RGraph) -> RGraph:
    return ~g


def vertex_degree(g: RGraph, v: int) -> int:
    if not 1 <= v <= g.space.n:
        raise ValidationError(f"vertex {v} out of range [1, {g.space.n}]")
    return popcount(g.bits & g.space.vertex_masks[v - 1])


def degree_sequence(space: EdgeSpace, mask: int) -> tuple[int, ...]:
    """Sorted vertex-degree multiset of ``mask``."""
    return tuple(sorted(popcount(mask & vm) for vm in space.vertex_masks))


# ---------------------------------------------------------------------------
# Permutations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Perm:
    """A permutation of ``[n]``; ``image[v-1]`` is the image of ``v``."""

    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(v) for v in self.image)
        object.__setattr__(self, "image", image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise ValidationError(f"{image} is not a permutation of [1, {len(image)}]")

    @classmethod
    def identity(cls, n: int) -> "Perm":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def from_cycles(cls, n: int, cycles: Iterable[Sequence[int]]) -> "Perm":
        image = list(range(1, n + 1))
        seen: set[int] = set()
        for cyc in cycles:
            for v in cyc:
                if v in seen or not 1 <= v <= n:
                    raise ValidationError(f"bad cycle {tuple(cyc)} for n={n}")
                seen.add(v)
            for a, b in zip(cyc, tuple(cyc[1:]) + (cyc[0],)):
                image[a - 1] = b
        return cls(tuple(image))

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, v: int) -> int:
        return self.image[v - 1]

    def compose(self, other: "Perm") -> "Perm":
        """``(self o other)(v) = self(other(v))``."""
        if other.n != self.n:
            raise ValidationError("permutations act on different vertex sets")
        return Perm(tuple(self.image[w - 1] for w in other.image))

    def inverse(self) -> "Perm":
        inv = [0] * self.n
        for v, w in enumerate(self.image, start=1):
            inv[w - 1] = v
        return Perm(tuple(inv))

    def is_involution(self) -> bool:
        return all(self.image[w - 1] == v for v, w in enumerate(self.image, start=1))

    def is_identity(self) -> bool:
        return all(w == v for v, w in enumerate(self.image, start=1))

    def fixed_points(self) -> list[int]:
        return [v for v, w in enumerate(self.image, start=1) if v == w]

    def two_cycles(self) -> list[tuple[int, int]]:
        """Unordered pairs ``(x, y)``, ``x < y``, with ``p(x) = y`` and ``p(y) = x``."""
        return [
            (v, w)
            for v, w in enumerate(self.image, start=1)
            if v < w and self.image[w - 1] == v
        ]

    def cycles(self) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            v = self(start)
            while v != start:
                cyc.append(v)
                seen.add(v)
                v = self(v)
            out.append(tuple(cyc))
        return out

    def __str__(self):
        cyc = [c for c in self.cycles() if len(c) > 1]
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "id"


def all_perms(n: int) -> Iterator[Perm]:
    """All of ``S_n`` in lexicographic order of the image tuple."""
    for image in itertools.permutations(range(1, n + 1)):
        yield Perm(image)


def _matchings(points: list[int]) -> Iterator[list[tuple[int, int]]]:
    if len(points) < 2:
        yield []
        return
    first, rest = points[0], points[1:]
    yield from ([] + m for m in _matchings(rest))
    for idx, partner in enumerate(rest):
        remaining = rest[:idx] + rest[idx + 1 :]
        for m in _matchings(remaining):
            yield [(first, partner)] + m


def involutions(n: int) -> list[Perm]:
    """All involutions of ``S_n``, ordered by number of 2-cycles, then image tuple."""
    out = [Perm.from_cycles(n, m) for m in _matchings(list(range(1, n + 1)))]
    out.sort(key=lambda p: (len(p.two_cycles()), p.image))
    return out


def canonical_involution(n: int) -> Perm:
    """``(1 2)(3 4)...`` with the fixed point, if any, at ``n``."""
    return Perm.from_cycles(n, [(2 * i + 1, 2 * i + 2) for i in range(n // 2)])


# ---------------------------------------------------------------------------
# Induced action on edges
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class EdgePerm:
    space: EdgeSpace
    source: Perm
    table: tuple[int, ...]

    def __call__(self, i: int) -> int:
        return self.table[i]

    def apply_mask(self, mask: int) -> int:
        out = 0
        table = self.table
        for i in iter_bits(mask):
            out |= 1 << table[i]
        return out

    @cached_property
    def byte_tables(self) -> np.ndarray:
        """``(nbytes, 256)`` uint64 lookup: image of each byte at each byte offset."""
        if not self.space.fits_word:
            raise CapacityError("vectorised edge permutation needs edge_count <= 64")
        nbytes = max(1, (self.space.edge_count + 7) // 8)
        out = np.zeros((nbytes, 256), dtype=np.uint64)
        for b in range(nbytes):
            for value in range(256):
                mask = value << (8 * b)
                if mask >> self.space.edge_count:
                    continue
                out[b, value] = self.apply_mask(mask)
        return out

    def apply_masks(self, masks: np.ndarray) -> np.ndarray:
        """Vectorised :meth:`apply_mask` over a ``uint64`` array."""
        masks = np.asarray(masks, dtype=np.uint64)
        tables = self.byte_tables
        out = np.zeros_like(masks)
        for b in range(tables.shape[0]):
            idx = (masks >> np.uint64(8 * b)) & np.uint64(0xFF)
            out |= tables[b][idx.astype(np.intp)]
        return out

    def inverse(self) -> "EdgePerm":
        inv = [0] * len(self.table)
        for i, j in enumerate(self.table):
            inv[j] = i
        return EdgePerm(self.space, self.source.inverse(), tuple(inv))

    def then(self, first: "EdgePerm") -> "EdgePerm":
        """Edge permutation of ``self.source o first.source``."""
        if first.space != self.space:
            raise SpaceMismatchError("edge permutations on different spaces")
        return EdgePerm(
            self.space,
            self.source.compose(first.source),
            tuple(self.table[j] for j in first.table),
        )


def induce_edge_perm(space: EdgeSpace, p: Perm) -> EdgePerm:
    if p.n != space.n:
        raise ValidationError(f"permutation on [{p.n}] used in space with n={space.n}")
    rank_of = space._rank_of
    image = p.image
    table = tuple(
        rank_of[tuple(sorted(image[v - 1] for v in e))] for e in space.edges
    )
    return EdgePerm(space, p, table)


def apply_perm(g: RGraph, ep: EdgePerm) -> RGraph:
    if ep.space != g.space:
        raise SpaceMismatchError(f"edge permutation built on {ep.space}, graph on {g.space}")
    return RGraph(g.space, ep.apply_mask(g.bits))


def masks_to_array(masks: Iterable[int]) -> np.ndarray:
    return np.fromiter((int(m) for m in masks), dtype=np.uint64)


def popcount_array(masks: np.ndarray) -> np.ndarray:
    return np.bitwise_count(np.asarray(masks, dtype=np.uint64)).astype(np.int64)


# ---------------------------------------------------------------------------
# Families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Family:
    """Ordered, duplicate-free r-graphs over one edge space, stored as masks."""

    space: EdgeSpace
    masks: tuple[int, ...]

    def __post_init__(self):
        masks = tuple(int(m) for m in self.masks)
        object.__setattr__(self, "masks", masks)
        full = self.space.full_mask
        seen = set()
        for m in masks:
            if m < 0 or m & ~full:
                raise ValidationError(f"mask {m:#x} has bits beyond edge_count")
            if m in seen:
                raise ValidationError(f"duplicate member {self.space.mask_hex(m)}")
            seen.add(m)

    @classmethod
    def from_graphs(cls, graphs: Iterable[RGraph], space: EdgeSpace | None = None) -> "Family":
        graphs = list(graphs)
        if space is None:
            if not graphs:
                raise ValidationError("empty family needs an explicit space")
            space = graphs[0].space
        for g in graphs:
            if g.space != space:
                raise SpaceMismatchError("family members live in different spaces")
        return cls(space, tuple(g.bits for g in graphs))

    def __len__(self):
        return len(self.masks)

    def __iter__(self) -> Iterator[RGraph]:
        return (RGraph(self.space, m) for m in self.masks)

    def __getitem__(self, i) -> RGraph:
        return RGraph(self.space, self.masks[i])

    def __contains__(self, g) -> bool:
        bits = g.bits if isinstance(g, RGraph) else g
        return bits in set(self.masks)

    def as_set(self) -> frozenset[int]:
        return frozenset(self.masks)

    def hexes(self) -> list[str]:
        return [self.space.mask_hex(m) for m in self.masks]

    def masks_array(self) -> np.ndarray:
        if not self.space.fits_word:
            raise CapacityError("uint64 mask arrays need edge_count <= 64")
        return masks_to_array(self.masks)
