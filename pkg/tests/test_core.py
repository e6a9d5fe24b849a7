import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from diffiso.core import (
    EdgeSpace,
    Family,
    Perm,
    RGraph,
    apply_perm,
    binom,
    canonical_involution,
    complement,
    difference,
    edge_space,
    induce_edge_perm,
    involutions,
    rank_edge,
    symmetric_difference,
    unrank_edge,
    vertex_degree,
)
from diffiso.errors import CapacityError, SpaceMismatchError, ValidationError

from oracles import all_involutions, colex_edges, image_mask

S42 = edge_space(4, 2)


@pytest.mark.parametrize("edge, rank", [((1, 2), 0), ((2, 4), 4), ((3, 4), 5)])
def test_rank_examples(edge, rank):
    assert rank_edge(S42, edge) == rank


@pytest.mark.parametrize("rank, edge", [(0, (1, 2)), (1, (1, 3)), (5, (3, 4))])
def test_unrank_examples(rank, edge):
    assert unrank_edge(S42, rank) == edge


@pytest.mark.parametrize("n", range(1, 11))
def test_rank_unrank_match_colex_enumeration(n):
    for r in range(1, min(n, 4) + 1):
        space = edge_space(n, r)
        expected = colex_edges(n, r)
        assert space.edge_count == len(expected)
        assert list(space.edges) == expected
        for i, e in enumerate(expected):
            assert space.rank(e) == i
            assert space.unrank(i) == e


@pytest.mark.parametrize(
    "bad",
    [(2, 1), (1, 1), (0, 2), (1, 5), (1,), (1, 2, 3)],
)
def test_invalid_edges_rejected(bad):
    with pytest.raises(ValidationError):
        S42.rank(bad)


def test_unrank_out_of_range():
    with pytest.raises(ValidationError):
        S42.unrank(6)
    with pytest.raises(ValidationError):
        S42.unrank(-1)


@pytest.mark.parametrize("n, r", [(0, 0), (3, 4), (3, 0)])
def test_bad_space(n, r):
    with pytest.raises(ValidationError):
        EdgeSpace(n, r)


def test_binom_table_and_cap():
    for n in range(0, 65):
        for k in range(0, n + 1):
            assert binom(n, k) == math.comb(n, k)
    assert binom(5, 7) == 0
    with pytest.raises(CapacityError):
        binom(65, 3)


def test_hex_padding_and_parse():
    assert S42.mask_hex(1) == "01"
    assert S42.parse_hex("3f") == 63
    assert edge_space(8, 2).mask_hex(5) == "0000005"
    with pytest.raises(ValidationError):
        S42.parse_hex("40")
    with pytest.raises(ValidationError):
        S42.parse_hex("zz")


def test_induce_examples():
    ident = induce_edge_perm(S42, Perm.identity(4))
    assert ident.table == tuple(range(6))
    ep = induce_edge_perm(S42, Perm.from_cycles(4, [(1, 2), (3, 4)]))
    assert ep(1) == 4 and ep(4) == 1
    assert ep(S42.rank((1, 2))) == S42.rank((1, 2))
    assert ep(S42.rank((3, 4))) == S42.rank((3, 4))


def test_apply_perm_examples():
    p = induce_edge_perm(S42, Perm.from_cycles(4, [(1, 2), (3, 4)]))
    assert apply_perm(RGraph.empty(S42), p) == RGraph.empty(S42)
    assert apply_perm(RGraph.from_edges(S42, [(1, 3)]), p) == RGraph.from_edges(S42, [(2, 4)])
    assert apply_perm(RGraph.full(S42), p) == RGraph.full(S42)


def test_set_operations_examples():
    g = RGraph.from_edges(S42, [(1, 3), (1, 4)])
    h = RGraph.from_edges(S42, [(1, 4), (2, 3)])
    assert difference(g, g) == RGraph.empty(S42)
    assert difference(g, h) == RGraph.from_edges(S42, [(1, 3)])
    assert symmetric_difference(g, h) == RGraph.from_edges(S42, [(1, 3), (2, 3)])
    assert len(complement(RGraph.empty(S42))) == 6
    with pytest.raises(SpaceMismatchError):
        difference(g, RGraph.empty(edge_space(5, 2)))


def test_vertex_degree_examples():
    assert vertex_degree(RGraph.empty(S42), 3) == 0
    assert all(vertex_degree(RGraph.full(S42), v) == 3 for v in range(1, 5))
    assert vertex_degree(RGraph.from_edges(S42, [(1, 3), (1, 4)]), 1) == 2
    with pytest.raises(ValidationError):
        vertex_degree(RGraph.empty(S42), 5)


def test_rgraph_rejects_stray_bits():
    with pytest.raises(ValidationError):
        RGraph(S42, 1 << 6)


def test_perm_validation_and_cycles():
    with pytest.raises(ValidationError):
        Perm((1, 1, 3))
    with pytest.raises(ValidationError):
        Perm((0, 1, 2))
    p = Perm.from_cycles(5, [(1, 2, 3)])
    assert p.image == (2, 3, 1, 4, 5)
    assert str(p) == "(1 2 3)"
    assert not p.is_involution()
    assert p.compose(p.inverse()).is_identity()
    assert Perm.from_cycles(4, [(1, 2), (3, 4)]).two_cycles() == [(1, 2), (3, 4)]


@pytest.mark.parametrize("n", range(1, 9))
def test_involutions_complete_and_ordered(n):
    found = involutions(n)
    assert sorted(p.image for p in found) == sorted(all_involutions(n))
    keys = [(len(p.two_cycles()), p.image) for p in found]
    assert keys == sorted(keys)
    assert found[0].is_identity()


def test_involution_counts():
    assert [len(involutions(n)) for n in range(1, 9)] == [1, 2, 4, 10, 26, 76, 232, 764]


def test_canonical_involution():
    assert canonical_involution(5).image == (2, 1, 4, 3, 5)
    assert canonical_involution(4).image == (2, 1, 4, 3)


perm_strategy = st.integers(2, 7).flatmap(
    lambda n: st.tuples(st.just(n), st.permutations(range(1, n + 1)), st.permutations(range(1, n + 1)))
)


@given(perm_strategy, st.integers(1, 4), st.data())
def test_induce_matches_direct_image_and_composes(nps, r, data):
    n, p, q = nps
    r = min(r, n)
    space = edge_space(n, r)
    P, Q = Perm(tuple(p)), Perm(tuple(q))
    ep, eq = induce_edge_perm(space, P), induce_edge_perm(space, Q)
    mask = data.draw(st.integers(0, space.full_mask))
    assert ep.apply_mask(mask) == image_mask(n, r, mask, p)
    assert induce_edge_perm(space, P.compose(Q)).table == ep.then(eq).table
    assert induce_edge_perm(space, P.inverse()).table == ep.inverse().table
    assert sorted(ep.table) == list(range(space.edge_count))


@given(perm_strategy, st.data())
def test_apply_preserves_size_and_distributes(nps, data):
    n, p, _ = nps
    space = edge_space(n, 2)
    ep = induce_edge_perm(space, Perm(tuple(p)))
    a = RGraph(space, data.draw(st.integers(0, space.full_mask)))
    b = RGraph(space, data.draw(st.integers(0, space.full_mask)))
    assert len(apply_perm(a, ep)) == len(a)
    for op in (lambda x, y: x | y, lambda x, y: x & y, lambda x, y: x - y):
        assert apply_perm(op(a, b), ep) == op(apply_perm(a, ep), apply_perm(b, ep))
    assert complement(complement(a)) == a
    assert len(a - b) + len(a & b) == len(a)


@given(st.integers(2, 9), st.data())
def test_vectorised_apply_matches_scalar(n, data):
    r = data.draw(st.integers(1, min(n, 3)))
    space = edge_space(n, r)
    if not space.fits_word:
        return
    p = Perm(tuple(data.draw(st.permutations(range(1, n + 1)))))
    ep = induce_edge_perm(space, p)
    masks = data.draw(st.lists(st.integers(0, space.full_mask), min_size=1, max_size=20))
    vec = ep.apply_masks(np.array(masks, dtype=np.uint64))
    assert vec.tolist() == [ep.apply_mask(m) for m in masks]


def test_family_rejects_duplicates_and_mixed_spaces():
    with pytest.raises(ValidationError, match="duplicate"):
        Family(S42, (1, 1))
    with pytest.raises(ValidationError):
        Family(S42, (64,))
    with pytest.raises(SpaceMismatchError):
        Family.from_graphs([RGraph.empty(S42), RGraph.empty(edge_space(5, 2))])
    fam = Family(S42, (3, 5))
    assert [g.bits for g in fam] == [3, 5]
    assert RGraph(S42, 5) in fam
    assert fam.hexes() == ["03", "05"]


def test_wide_space_uses_python_ints():
    space = edge_space(10, 3)
    assert not space.fits_word
    g = RGraph.full(space)
    assert len(g) == 120
    p = induce_edge_perm(space, Perm(tuple(range(10, 0, -1))))
    assert apply_perm(g, p) == g
    with pytest.raises(CapacityError):
        p.apply_masks(np.zeros(1, dtype=np.uint64))


def test_edge_array_matches_edges():
    space = edge_space(6, 3)
    arr = space.edge_array
    assert arr.shape == (20, 3)
    assert [tuple(int(v) + 1 for v in row) for row in arr] == list(space.edges)


def test_all_perms_lex():
    from diffiso.core import all_perms

    assert [p.image for p in all_perms(3)] == list(itertools.permutations(range(1, 4)))
