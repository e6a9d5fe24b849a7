import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from diffiso.constructions import (
    appendix_family,
    extremal_family,
    layer_family,
    middle_layer_family,
    perfect_matchings_family,
    star_family,
)
from diffiso.core import Family, RGraph, edge_space, induce_edge_perm, involutions
from diffiso.errors import CapacityError, FamilyFormatError
from diffiso.family import (
    FORMAT,
    approximate_bound_ok,
    complement_family,
    dualize,
    dumps_family,
    find_involution_clique,
    is_difference_isomorphic,
    is_psi_clique,
    loads_family,
    read_family,
    write_family,
)
from diffiso.family import _verify_python, _verify_vectorised
from diffiso.isocanon import CanonCache
from diffiso.isocanon import canon_mask
from diffiso.relation import arrow, e_psi, f_r

from oracles import difference_isomorphic_nx, mask_to_sets

S42 = edge_space(4, 2)


def test_verify_examples():
    rep = is_difference_isomorphic(extremal_family(4, 2)[0])
    assert rep.ok and rep.checked_pairs == 6 and rep.witness is None
    bad = Family.from_graphs([RGraph.from_edges(S42, [(1, 2), (1, 3)]), RGraph.from_edges(S42, [(1, 2)])])
    rep = is_difference_isomorphic(bad)
    assert not rep.ok
    assert (rep.witness.i, rep.witness.j) == (0, 1)
    assert rep.witness.diff_ij == 1 << S42.rank((1, 3))
    assert rep.witness.diff_ji == 0
    assert is_difference_isomorphic(middle_layer_family(2)).ok


def test_report_json_shape():
    bad = Family(S42, (3, 1))
    doc = is_difference_isomorphic(bad).to_json()
    assert set(doc) == {"ok", "witness", "checked_pairs", "elapsed_ms"}
    assert doc["witness"] == {"i": 0, "j": 1, "diff_ij_hex": "02", "diff_ji_hex": "00"}


def _mutate(fam, rng):
    """Add one graph that breaks the family at a known position."""
    space = fam.space
    while True:
        m = rng.getrandbits(space.edge_count)
        if m in fam.masks:
            continue
        if not difference_isomorphic_nx(space.n, [fam.masks[0], m]):
            return Family(space, fam.masks[:3] + (m,) + fam.masks[3:])


@pytest.mark.parametrize("seed", range(5))
def test_mutation_is_caught_with_correct_witness(seed):
    rng = random.Random(seed)
    fam = extremal_family(6, 2)[0]
    broken = _mutate(fam, rng)
    rep = is_difference_isomorphic(broken)
    assert not rep.ok
    w = rep.witness
    a, b = broken.masks[w.i], broken.masks[w.j]
    assert w.diff_ij == a & ~b and w.diff_ji == b & ~a
    assert canon_mask(broken.space, w.diff_ij) != canon_mask(broken.space, w.diff_ji)
    # the first failing pair in (i, j) index order
    first = next(
        (i, j)
        for i, j in itertools.combinations(range(len(broken)), 2)
        if not difference_isomorphic_nx(6, [broken.masks[i], broken.masks[j]])
    )
    assert (w.i, w.j) == first
    assert rep.checked_pairs == sum(len(broken) - 1 - i for i in range(first[0])) + first[1] - first[0]


def test_python_and_vectorised_paths_agree():
    rng = random.Random(3)
    space = edge_space(5, 2)
    for _ in range(40):
        fam = Family(space, tuple(rng.sample(range(1024), rng.randint(9, 30))))
        cache = CanonCache(space)
        assert _verify_python(fam, cache) == _verify_vectorised(fam, cache)
    fam = extremal_family(5, 2)[0]
    assert _verify_python(fam, CanonCache(space)) == _verify_vectorised(fam, CanonCache(space)) == (None, 120)


@given(st.lists(st.integers(0, 1023), min_size=2, max_size=12, unique=True))
def test_verifier_matches_networkx(masks):
    fam = Family(edge_space(5, 2), tuple(masks))
    assert is_difference_isomorphic(fam).ok == difference_isomorphic_nx(5, masks)


def test_find_involution_clique_examples():
    psi = find_involution_clique(extremal_family(4, 2)[0])
    assert psi is not None and psi.is_involution()
    assert is_psi_clique(extremal_family(4, 2)[0], psi)
    assert find_involution_clique(appendix_family(8, 2)[0]) is None
    single = Family(S42, (5,))
    assert find_involution_clique(single).is_identity()


def test_find_involution_clique_cap():
    fam = Family(edge_space(13, 1), (1, 2))
    with pytest.raises(CapacityError):
        find_involution_clique(fam)


@pytest.mark.parametrize(
    "fam",
    [
        extremal_family(4, 2)[0],
        extremal_family(5, 2)[0],
        extremal_family(6, 3)[0],
        perfect_matchings_family(4),
        middle_layer_family(2),
        middle_layer_family(3),
        layer_family(4, 1, 2),
        star_family(6, 2),
    ],
    ids=["ext4", "ext5", "ext6_3", "match4", "mid2", "mid3", "layer", "stars"],
)
def test_clique_witness_is_valid_and_respects_cap(fam):
    psi = find_involution_clique(fam)
    if psi is None:
        # confirm no involution makes every ordered pair arrow-related
        for p in involutions(fam.space.n):
            ep = induce_edge_perm(fam.space, p)
            assert not all(arrow(a, b, ep) for a in fam for b in fam)
        return
    ep = induce_edge_perm(fam.space, psi)
    assert all(arrow(a, b, ep) for a in fam for b in fam)
    if len(fam) <= 64:
        assert e_psi(fam, ep) == len(fam) ** 2
    assert len(fam) <= 2 ** f_r(fam.space.n, fam.space.r)


def test_detector_agrees_with_pairwise_arrows_small():
    rng = random.Random(11)
    for _ in range(60):
        masks = tuple(rng.sample(range(64), rng.randint(1, 5)))
        fam = Family(S42, masks)
        for p in involutions(4):
            ep = induce_edge_perm(S42, p)
            assert is_psi_clique(fam, p) == all(arrow(a, b, ep) for a in fam for b in fam)


@pytest.mark.parametrize(
    "fam",
    [
        extremal_family(4, 2)[0],
        extremal_family(6, 2)[0],
        middle_layer_family(2),
        middle_layer_family(4),
        perfect_matchings_family(6),
        star_family(6, 3),
        appendix_family(8, 2)[0],
        layer_family(5, 1, 2),
    ],
    ids=["ext4", "ext6", "mid2", "mid4", "match6", "stars", "appendix", "layer"],
)
def test_complement_and_dual_preserve_property(fam):
    assert is_difference_isomorphic(fam).ok
    comp = complement_family(fam)
    assert complement_family(comp) == fam
    assert is_difference_isomorphic(comp).ok
    dual = dualize(fam)
    assert len(dual) == len(fam)
    assert (dual.space.n, dual.space.r) == (fam.space.n, fam.space.n - fam.space.r)
    assert dualize(dual) == fam
    assert is_difference_isomorphic(dual).ok
    assert approximate_bound_ok(fam) in (True, None)


def test_dual_examples():
    dual = dualize(middle_layer_family(2))
    assert [mask_to_sets(3, 1, m) for m in dual.masks] == [{frozenset({3})}, {frozenset({2})}, {frozenset({1})}]
    d = dualize(layer_family(4, 1, 2))
    assert (d.space.r, len(d)) == (3, 6)
    assert complement_family(Family(S42, (0,))).masks == (63,)


def test_bound_helper():
    assert approximate_bound_ok(extremal_family(6, 2)[0]) is True
    assert approximate_bound_ok(Family(S42, (1, 3))) is None


def test_round_trip(tmp_path):
    fam = extremal_family(4, 2)[0]
    path = tmp_path / "f.json"
    write_family(fam, path, meta={"note": "x"})
    assert read_family(path) == fam
    doc = json.loads(path.read_text())
    assert doc["format"] == FORMAT and doc["graphs"] == fam.hexes()


def _doc(**over):
    fam = extremal_family(4, 2)[0]
    doc = json.loads(dumps_family(fam))
    doc.update(over)
    return doc


def _text(doc):
    return json.dumps(doc, indent=2)


def test_parse_errors_carry_line_numbers():
    with pytest.raises(FamilyFormatError) as exc:
        loads_family('{\n  "format": "diffiso-family/1",\n  "n": 4,\n  oops\n}')
    assert exc.value.line == 4
    with pytest.raises(FamilyFormatError, match="format"):
        loads_family(_text(_doc(format="other/9")))
    text = _text(_doc(r=5, digest=None))
    with pytest.raises(FamilyFormatError) as exc:
        loads_family(text)
    assert exc.value.line == text.split("\n").index('  "r": 5,') + 1


def test_duplicate_member_reports_last_line():
    doc = _doc(graphs=["06", "14", "06"])
    doc["digest"] = None
    text = _text(doc)
    with pytest.raises(FamilyFormatError, match="duplicate") as exc:
        loads_family(text)
    lines = text.split("\n")
    assert exc.value.line == max(i for i, line in enumerate(lines, 1) if '"06"' in line)


def test_digest_and_expectation_errors():
    with pytest.raises(FamilyFormatError, match="digest"):
        loads_family(_text(_doc(graphs=["06", "14"])))
    with pytest.raises(FamilyFormatError):
        loads_family(_text(_doc()), expect_n=5)
    with pytest.raises(FamilyFormatError):
        loads_family(_text(_doc(graphs=["zz"], digest=None)))
    with pytest.raises(FamilyFormatError):
        loads_family(_text(_doc(graphs=["40"], digest=None)))
    fam = loads_family(_text(_doc(digest=None)))
    assert len(fam) == 4


@settings(max_examples=40)
@given(st.integers(2, 7).flatmap(lambda n: st.tuples(st.just(n), st.integers(1, n))), st.data())
def test_file_round_trip_property(nr, data):
    n, r = nr
    space = edge_space(n, r)
    masks = data.draw(st.lists(st.integers(0, space.full_mask), max_size=10, unique=True))
    fam = Family(space, tuple(masks))
    assert loads_family(dumps_family(fam)) == fam
