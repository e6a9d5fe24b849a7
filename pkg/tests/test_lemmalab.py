import math

import pytest

from diffiso import lemmalab
from diffiso.constructions import extremal_family
from diffiso.core import Family, Perm, RGraph, edge_space, induce_edge_perm
from diffiso.errors import CapacityError, LemmaViolation, ValidationError
from diffiso.lemmalab import (
    ASSERTED,
    REPORT_ONLY,
    check_eq_2,
    check_lemma_2_3,
    check_lemma_2_4,
    check_lemma_2_6,
    check_lemma_3_2,
    check_lemma_3_3,
    check_lemma_3_4,
    check_lemma_3_7,
    check_prop_2_7,
    estimate_e_psi,
    lemma34_bound,
    run_check,
    unshared_two_cycles,
)
from diffiso.relation import choosable_pairs, e_psi, lemma32_bound, neighborhood

from oracles import all_involutions, edge_cycle_counts

S42 = edge_space(4, 2)
PSI = Perm.from_cycles(4, [(1, 2), (3, 4)])


def test_lemma_2_3_examples():
    rep = check_lemma_2_3(4, 2)
    assert rep.mode == ASSERTED
    assert (rep.instances_checked, rep.violations) == (1536, 0)
    ident = induce_edge_perm(S42, Perm.identity(4))
    assert all(neighborhood(RGraph(S42, g), ident).masks == (g,) for g in range(64))


@pytest.mark.parametrize("n, r, f, count", [(5, 2, 4, 26), (6, 3, 10, 76), (4, 2, 2, 10)])
def test_lemma_2_4_examples(n, r, f, count):
    rep = check_lemma_2_4(n, r)
    assert rep.violations == 0 and rep.instances_checked == count
    assert rep.parameters["max_c2"] == {f"{n},{r}": f}
    # oracle: max 2-cycles over every involution, from first principles
    assert max(edge_cycle_counts(n, r, p)[1] for p in all_involutions(n)) == f


def test_lemma_2_4_attained_by_matching_n4():
    assert edge_cycle_counts(4, 2, (2, 1, 4, 3))[1] == 2


def test_lemma_2_4_sweep_and_cap():
    rep = check_lemma_2_4(8, 4, sweep=True)
    assert rep.violations == 0 and len(rep.parameters["max_c2"]) == 1 + 2 + 3 + 4 * 5
    with pytest.raises(CapacityError):
        check_lemma_2_4(9, 2)


def test_lemma_2_6_examples():
    rep = check_lemma_2_6(4, 2)
    assert rep.violations == 0 and rep.instances_checked == 10 * 64 * 64


def test_eq2_examples():
    assert check_eq_2(8, 2).instances_checked == 764
    assert check_eq_2(6, 3).instances_checked == 76
    assert check_eq_2(8, 4, sweep=True).violations == 0


@pytest.mark.parametrize("n, r, size", [(4, 2, 4), (6, 2, 64), (3, 2, 2)])
def test_prop_2_7_examples(n, r, size):
    rep = check_prop_2_7(n, r)
    assert rep.violations == 0 and rep.worst_ratio == 1.0
    assert rep.instances_checked == size * size + 20


def test_lemma_3_2_exhaustive_and_witness():
    rep = check_lemma_3_2(4, 2)
    assert rep.instances_checked == 64 * 24 * 24
    assert rep.violations == 0
    assert rep.worst_ratio == pytest.approx(1.0, abs=1e-12)
    g = RGraph.from_edges(S42, [(1, 3)])
    ep = induce_edge_perm(S42, PSI)
    nb = neighborhood(g, ep)
    fam = Family(S42, tuple(sorted(nb.masks)))
    assert e_psi(fam, ep) == 4 == lemma32_bound(1, 1)
    ident = induce_edge_perm(S42, Perm.identity(4))
    assert e_psi(Family(S42, neighborhood(g, ident).masks), ep) == 1 == lemma32_bound(0, 0)


def test_lemma_3_2_sampled_is_seed_deterministic():
    a = check_lemma_3_2(5, 2, "sampled", samples=300, seed=7)
    b = check_lemma_3_2(5, 2, "sampled", samples=300, seed=7)
    c = check_lemma_3_2(5, 2, "sampled", samples=300, seed=8)
    assert a.to_json() == b.to_json()
    assert a.violations == 0 and a.instances_checked == 300
    assert c.seed == 8
    with pytest.raises(ValidationError):
        check_lemma_3_2(4, 1)
    with pytest.raises(ValidationError):
        check_lemma_3_2(4, 2, "bogus")
    with pytest.raises(CapacityError):
        check_lemma_3_2(7, 2, "sampled")


def test_lemma_3_4_examples():
    assert unshared_two_cycles(Perm.identity(4), PSI) == 2
    assert lemma34_bound(4, 2, 2) == 2
    ident = induce_edge_perm(S42, Perm.identity(4))
    assert all(len(choosable_pairs(RGraph(S42, g), ident)) == 0 for g in range(64))
    assert unshared_two_cycles(PSI, PSI) == 0
    assert lemma34_bound(4, 2, 0) == 3
    rep = check_lemma_3_4(5, 2)
    assert rep.violations == 0 and rep.instances_checked == 1024 * 120 * 120


def test_lemma_3_4_sampled_matches_exhaustive_logic():
    rep = check_lemma_3_4(5, 2, "sampled", samples=2000, seed=3)
    assert rep.violations == 0 and rep.instances_checked == 2000
    assert rep.to_json() == check_lemma_3_4(5, 2, "sampled", samples=2000, seed=3).to_json()


def test_lemma_3_7_examples():
    rep = check_lemma_3_7(6)
    assert rep.violations == 0 and rep.instances_checked == 720 * 4
    # n = 4, phi0 = (1 2)(3 4), A = 0: only phi0 itself shares both 2-cycles
    perms, masks = lemmalab._two_cycle_masks(4)
    i = [p.image for p in perms].index(PSI.image)
    shared = [bin(int(masks[i]) & int(m)).count("1") for m in masks]
    assert sum(s >= 2 for s in shared) == 1
    # A = n/2 is trivial
    assert 6 ** 6 >= math.factorial(6)


def test_lemma_3_3_report_only():
    rep = check_lemma_3_3(6, 2, delta=4)
    assert rep.mode == REPORT_ONLY
    assert rep.instances_checked + rep.parameters["skipped_hypothesis_false"] == 720
    assert "min_margin" in rep.parameters
    rep1 = check_lemma_3_3(4, 2, delta=1)
    assert rep1.parameters["skipped_hypothesis_false"] >= 1  # identity fails the hypothesis
    with pytest.raises(ValidationError):
        check_lemma_3_3(4, 2, delta=0.5)


def test_violation_aborts_with_reproduction_data(monkeypatch):
    monkeypatch.setattr(lemmalab, "lemma32_log_bound", lambda m, mg: -1.0)
    with pytest.raises(LemmaViolation) as exc:
        check_lemma_3_2(4, 2, "sampled", samples=10, seed=5)
    rep = exc.value.report
    assert rep.violations == 10 and rep.seed == 5
    assert set(rep.first_violation) == {"G", "phi", "psi", "m", "m_g", "e_psi"}
    quiet = check_lemma_3_2(4, 2, "sampled", samples=10, seed=5, raise_on_violation=False)
    assert quiet.violations == 10


def test_lemma_3_4_violation_path(monkeypatch):
    monkeypatch.setattr(lemmalab, "lemma34_bound", lambda n, r, t: -1)
    with pytest.raises(LemmaViolation):
        check_lemma_3_4(4, 2)


def test_estimator_tracks_exact_count():
    fam, psi = extremal_family(6, 2)
    ep = induce_edge_perm(fam.space, psi)
    est, err = estimate_e_psi(fam, ep, samples=2000, seed=1)
    assert est == e_psi(fam, ep) and err == 0
    sub = Family(fam.space, fam.masks[:8] + (0,))
    exact = e_psi(sub, ep)
    est, err = estimate_e_psi(sub, ep, samples=20000, seed=2)
    assert abs(est - exact) <= 5 * err + 1e-9
    assert estimate_e_psi(sub, ep, samples=500, seed=4) == estimate_e_psi(sub, ep, samples=500, seed=4)


def test_run_check_dispatch():
    assert run_check("3.7", 5).lemma_id == "3.7"
    assert run_check("eq2", 6, 3, sweep=True).violations == 0
    with pytest.raises(ValidationError):
        run_check("9.9", 4, 2)
    with pytest.raises(ValidationError):
        run_check("3.3", 4, 2)
