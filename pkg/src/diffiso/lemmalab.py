"""Finite checks of the structural statements behind the main theorem.

Statements that hold for every ``n >= r`` are *asserted*: a violation
raises :class:`~diffiso.errors.LemmaViolation` carrying the report.
Statements that only claim something for large ``n`` are *report_only*
and merely count counterexamples.

Sampling uses numpy's Philox generator, keyed by the 64-bit seed stored in
the report, so a report can always be reproduced from its parameters.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .config import enum_cap
from .constructions import extremal_family
from .core import (
    Family,
    Perm,
    RGraph,
    all_perms,
    binom,
    edge_space,
    induce_edge_perm,
    involutions,
)
from .errors import CapacityError, LemmaViolation, ValidationError
from .family import find_involution_clique, is_psi_clique
from .relation import (
    arrow_masks,
    c1_size_formula,
    choosable_pairs,
    cycle_partition,
    e_psi,
    f_r,
    lemma32_log_bound,
    neighborhood,
)

ASSERTED = "asserted"
REPORT_ONLY = "report_only"
DEFAULT_SAMPLES = 100_000
DEFAULT_SEED = 0


@dataclass
class LemmaReport:
    lemma_id: str
    mode: str
    instances_checked: int = 0
    violations: int = 0
    worst_ratio: float | None = None
    parameters: dict = field(default_factory=dict)
    seed: int | None = None
    first_violation: dict | None = None

    def violation(self, **data) -> None:
        self.violations += 1
        if self.first_violation is None:
            self.first_violation = data

    def ratio(self, value: float) -> None:
        if self.worst_ratio is None or value > self.worst_ratio:
            self.worst_ratio = value

    def to_json(self) -> dict:
        return asdict(self)


def _finish(report: LemmaReport, raise_on_violation: bool) -> LemmaReport:
    if report.mode == ASSERTED and report.violations and raise_on_violation:
        raise LemmaViolation(report)
    return report


def make_rng(seed: int) -> np.random.Generator:
    if not 0 <= seed < 2**64:
        raise ValidationError("seed must fit in 64 unsigned bits")
    return np.random.Generator(np.random.Philox(key=seed))


def _require(count: int, what: str) -> None:
    if count > enum_cap():
        raise CapacityError(f"{what} needs {count} instances, cap is {enum_cap()}")


def _random_perm(rng: np.random.Generator, n: int) -> Perm:
    return Perm(tuple(int(v) + 1 for v in rng.permutation(n)))


def _random_mask(rng: np.random.Generator, E: int) -> int:
    bits = rng.integers(0, 2, size=E)
    return sum(1 << i for i in np.flatnonzero(bits).tolist())


def _perm_tables(space, perms):
    return [induce_edge_perm(space, p) for p in perms]


def estimate_e_psi(family: Family, ep_psi, samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED):
    """Monte Carlo estimate of ``e_psi(family)`` from uniformly drawn ordered pairs.

    Returns ``(estimate, standard_error)``; use when the family is too large
    for the exact quadratic count.
    """
    if len(family) == 0:
        raise ValidationError("e_psi needs a nonempty family")
    if samples < 1:
        raise ValidationError("samples must be positive")
    rng = make_rng(seed)
    k = len(family)
    idx = rng.integers(0, k, size=(samples, 2))
    masks = family.masks
    hits = sum(arrow_masks(ep_psi, masks[a], masks[b]) for a, b in idx.tolist())
    p = hits / samples
    return p * k * k, math.sqrt(p * (1 - p) / samples) * k * k


# ---------------------------------------------------------------------------
# Arrow relation, involutions and cliques
# ---------------------------------------------------------------------------


def check_lemma_2_3(n: int = 4, r: int = 2, raise_on_violation: bool = True) -> LemmaReport:
    """Neighbourhoods built from choosable pairs equal a brute-force arrow scan."""
    space = edge_space(n, r)
    if not space.fits_word:
        raise CapacityError("exhaustive scan needs C(n, r) <= 64")
    k = 1 << space.edge_count
    _require(k * math.factorial(n), f"lemma 2.3 at ({n}, {r})")
    M = np.arange(k, dtype=np.uint64)
    report = LemmaReport("2.3", ASSERTED, parameters={"n": n, "r": r})
    for phi in all_perms(n):
        ep = induce_edge_perm(space, phi)
        for g in range(k):
            gg = np.uint64(g)
            brute = M[ep.apply_masks(gg & ~M) == (M & ~gg)]
            m = len(choosable_pairs(RGraph(space, g), ep))
            nb = neighborhood(RGraph(space, g), ep, cap=max(enum_cap(), 1 << m))
            report.instances_checked += 1
            if set(brute.tolist()) != nb.as_set() or len(nb) != 1 << m:
                report.violation(G=space.mask_hex(g), phi=str(phi), brute=len(brute), built=len(nb), m=m)
    return _finish(report, raise_on_violation)


def _spaces(n: int, r: int, sweep: bool):
    if sweep:
        for nn in range(1, n + 1):
            for rr in range(1, min(r, nn) + 1):
                yield nn, rr
    else:
        yield n, r


def check_lemma_2_4(n: int, r: int, sweep: bool = False, raise_on_violation: bool = True) -> LemmaReport:
    """Maximum number of edge 2-cycles over involutions equals ``f_r(n)``.

    With ``sweep`` every ``(n', r')`` with ``r' <= r`` and ``r' <= n' <= n``
    is checked.
    """
    if n > 8:
        raise CapacityError("involution sweeps are capped at n <= 8")
    report = LemmaReport("2.4", ASSERTED, parameters={"n": n, "r": r, "sweep": sweep})
    per_space = {}
    for nn, rr in _spaces(n, r, sweep):
        space = edge_space(nn, rr)
        best = -1
        best_few_fixed = -1
        for psi in involutions(nn):
            c2 = len(cycle_partition(space, psi).c2)
            report.instances_checked += 1
            best = max(best, c2)
            if len(psi.fixed_points()) <= 1:
                best_few_fixed = max(best_few_fixed, c2)
        target = f_r(nn, rr)
        per_space[f"{nn},{rr}"] = best
        if target:
            report.ratio(best / target)
        if best != target or best_few_fixed != best:
            report.violation(n=nn, r=rr, max_c2=best, max_c2_few_fixed=best_few_fixed, f_r=target)
    report.parameters["max_c2"] = per_space
    return _finish(report, raise_on_violation)


def check_lemma_2_6(n: int = 4, r: int = 2, raise_on_violation: bool = True) -> LemmaReport:
    """For every involution the arrow relation is an equivalence relation and
    coincides with the structural description (agreement on fixed edges,
    equal counts on every edge 2-cycle)."""
    space = edge_space(n, r)
    E = space.edge_count
    if E > 10:
        raise CapacityError("pairwise sweep is capped at C(n, r) <= 10")
    k = 1 << E
    M = np.arange(k, dtype=np.uint64)
    bits = ((M[:, None] >> np.arange(E, dtype=np.uint64)) & np.uint64(1)).astype(np.int8)
    report = LemmaReport("2.6", ASSERTED, parameters={"n": n, "r": r})
    for psi in involutions(n):
        ep = induce_edge_perm(space, psi)
        part = cycle_partition(space, psi)
        A = np.empty((k, k), dtype=bool)
        for g in range(k):
            gg = np.uint64(g)
            A[g] = ep.apply_masks(gg & ~M) == (M & ~gg)
        cols = [bits[:, list(part.c1)]]
        if part.c2:
            cols.append(bits[:, [e for e, _ in part.c2]] + bits[:, [f for _, f in part.c2]])
        sig = np.concatenate(cols, axis=1)
        _, cls = np.unique(sig, axis=0, return_inverse=True)
        S = cls.reshape(-1)[:, None] == cls.reshape(-1)[None, :]
        report.instances_checked += k * k
        bad = np.argwhere(A != S)
        for g, h in bad[:1]:
            report.violation(psi=str(psi), G=space.mask_hex(int(g)), H=space.mask_hex(int(h)),
                             arrow=bool(A[g, h]), structural=bool(S[g, h]))
        report.violations += max(0, len(bad) - 1)
        if not A.diagonal().all():
            report.violation(psi=str(psi), property="reflexive")
        if not (A == A.T).all():
            report.violation(psi=str(psi), property="symmetric")
        # transitive iff related graphs have identical rows
        _, rid = np.unique(np.packbits(A, axis=1), axis=0, return_inverse=True)
        rid = rid.reshape(-1)
        if not (rid[:, None] == rid[None, :])[A].all():
            report.violation(psi=str(psi), property="transitive")
    return _finish(report, raise_on_violation)


def check_eq_2(n: int, r: int, sweep: bool = False, raise_on_violation: bool = True) -> LemmaReport:
    """Closed-form count of fixed edges against a direct count, per involution."""
    if n > 8:
        raise CapacityError("involution sweeps are capped at n <= 8")
    report = LemmaReport("eq2", ASSERTED, parameters={"n": n, "r": r, "sweep": sweep})
    for nn, rr in _spaces(n, r, sweep):
        space = edge_space(nn, rr)
        for psi in involutions(nn):
            a = len(psi.fixed_points())
            b = len(psi.two_cycles())
            direct = len(cycle_partition(space, psi).c1)
            formula = c1_size_formula(a, b, rr)
            report.instances_checked += 1
            if direct != formula:
                report.violation(n=nn, r=rr, psi=str(psi), direct=direct, formula=formula)
    return _finish(report, raise_on_violation)


def check_prop_2_7(
    n: int,
    r: int,
    samples: int = 20,
    seed: int = DEFAULT_SEED,
    raise_on_violation: bool = True,
) -> LemmaReport:
    """The extremal family is a psi-clique of size ``2**f_r(n)``; detected
    cliques among random subfamilies never exceed that size."""
    fam, psi = extremal_family(n, r)
    ep = induce_edge_perm(fam.space, psi)
    bound = 1 << f_r(n, r)
    report = LemmaReport("2.7", ASSERTED, parameters={"n": n, "r": r, "samples": samples}, seed=seed)
    pairs = e_psi(fam, ep)
    report.instances_checked += len(fam) ** 2
    report.ratio(len(fam) / bound)
    if len(fam) != bound:
        report.violation(size=len(fam), bound=bound)
    if pairs != len(fam) ** 2:
        report.violation(psi=str(psi), related_pairs=pairs, expected=len(fam) ** 2)
    if not is_psi_clique(fam, psi):
        report.violation(psi=str(psi), structural=False)
    rng = make_rng(seed)
    for _ in range(samples):
        size = int(rng.integers(1, len(fam) + 1))
        idx = np.sort(rng.choice(len(fam), size=size, replace=False))
        sub = Family(fam.space, tuple(fam.masks[i] for i in idx.tolist()))
        found = find_involution_clique(sub)
        report.instances_checked += 1
        if found is None:
            report.violation(subfamily=sub.hexes(), detected=None)
            continue
        related = e_psi(sub, induce_edge_perm(fam.space, found))
        if related != len(sub) ** 2 or len(sub) > bound:
            report.violation(subfamily=sub.hexes(), detected=str(found), related_pairs=related)
    return _finish(report, raise_on_violation)


# ---------------------------------------------------------------------------
# Counting bounds
# ---------------------------------------------------------------------------


def _triples(n: int, E: int, mode: str, samples: int, rng):
    """Yield ``(G mask, phi, psi)``; exhaustive order is G, then phi, then psi."""
    if mode == "exhaustive":
        perms = list(all_perms(n))
        for g in range(1 << E):
            for phi in perms:
                for psi in perms:
                    yield g, phi, psi
    else:
        for _ in range(samples):
            yield _random_mask(rng, E), _random_perm(rng, n), _random_perm(rng, n)


def _check_mode(mode: str) -> None:
    if mode not in ("exhaustive", "sampled"):
        raise ValidationError(f"mode must be 'exhaustive' or 'sampled', got {mode!r}")


def check_lemma_3_2(
    n: int = 4,
    r: int = 2,
    mode: str = "exhaustive",
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    raise_on_violation: bool = True,
) -> LemmaReport:
    """``e_psi(N_phi(G)) <= 4**m_g * 3.9**(m - m_g)`` over triples ``(G, phi, psi)``."""
    _check_mode(mode)
    if r < 2:
        raise ValidationError("the bound is stated for r >= 2")
    if n > 6:
        raise CapacityError("lemma 3.2 checks are capped at n <= 6")
    space = edge_space(n, r)
    E = space.edge_count
    if mode == "exhaustive":
        _require((1 << E) * math.factorial(n) ** 2, f"exhaustive lemma 3.2 at ({n}, {r})")
    rng = make_rng(seed)
    report = LemmaReport(
        "3.2", ASSERTED,
        parameters={"n": n, "r": r, "mode": mode, "samples": samples if mode == "sampled" else None},
        seed=seed,
    )
    eps = {}

    def edge_perm(p):
        ep = eps.get(p.image)
        if ep is None:
            ep = eps[p.image] = induce_edge_perm(space, p)
        return ep

    last = None
    for g, phi, psi in _triples(n, E, mode, samples, rng):
        ep_phi, ep_psi = edge_perm(phi), edge_perm(psi)
        if last != (g, phi.image):
            G = RGraph(space, g)
            pairs = choosable_pairs(G, ep_phi)
            N = neighborhood(G, ep_phi, cap=max(enum_cap(), 1 << len(pairs)))
            NA = N.masks_array()
            D1 = NA[:, None] & ~NA[None, :]
            D2 = D1.T
            last = (g, phi.image)
        m = len(pairs)
        m_g = sum(1 for p in pairs if ep_psi(p.e_rank) == p.f_rank and ep_psi(p.f_rank) == p.e_rank)
        count = int(np.count_nonzero(ep_psi.apply_masks(D1) == D2))
        log_ratio = math.log(count) - lemma32_log_bound(m, m_g)
        report.instances_checked += 1
        report.ratio(math.exp(log_ratio))
        if log_ratio > 1e-12:
            report.violation(G=space.mask_hex(g), phi=str(phi), psi=str(psi), m=m, m_g=m_g, e_psi=count)
    return _finish(report, raise_on_violation)


def good_pair_candidates(ep_phi, ep_psi) -> list[int]:
    """Edges ``e`` for which ``(e, phi(e))`` is good whenever it is choosable."""
    phi, psi = ep_phi.table, ep_psi.table
    return [e for e in range(len(phi)) if phi[e] != e and psi[e] == phi[e] and psi[phi[e]] == e]


def lemma34_bound(n: int, r: int, t: int) -> float:
    return binom(n, r) / 2 - binom(t, r)


def unshared_two_cycles(phi: Perm, psi: Perm) -> int:
    """2-cycles of psi that are not 2-cycles of phi."""
    return len(set(psi.two_cycles()) - set(phi.two_cycles()))


def check_lemma_3_4(
    n: int = 4,
    r: int = 2,
    mode: str = "exhaustive",
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    raise_on_violation: bool = True,
) -> LemmaReport:
    """``m_g <= C(n, r)/2 - C(t, r)`` over triples ``(G, phi, psi)``.

    The exhaustive mode handles all graphs of one ``(phi, psi)`` at once.
    """
    _check_mode(mode)
    space = edge_space(n, r)
    E = space.edge_count
    if not space.fits_word:
        raise CapacityError("lemma 3.4 checks need C(n, r) <= 64")
    report = LemmaReport(
        "3.4", ASSERTED,
        parameters={"n": n, "r": r, "mode": mode, "samples": samples if mode == "sampled" else None},
        seed=seed,
    )
    if mode == "exhaustive":
        _require((1 << E) * math.factorial(n) ** 2, f"exhaustive lemma 3.4 at ({n}, {r})")
        perms = list(all_perms(n))
        eps = _perm_tables(space, perms)
        M = np.arange(1 << E, dtype=np.uint64)
        one = np.uint64(1)
        for phi, ep_phi in zip(perms, eps):
            for psi, ep_psi in zip(perms, eps):
                bound = lemma34_bound(n, r, unshared_two_cycles(phi, psi))
                m_g = np.zeros(len(M), dtype=np.int64)
                for e in good_pair_candidates(ep_phi, ep_psi):
                    f = ep_phi(e)
                    m_g += ((M >> np.uint64(e)) & one & ~(M >> np.uint64(f))).astype(np.int64)
                report.instances_checked += len(M)
                worst = int(m_g.max())
                if bound > 0:
                    report.ratio(worst / bound)
                bad = np.flatnonzero(m_g > bound)
                if len(bad):
                    g = int(bad[0])
                    report.violation(G=space.mask_hex(g), phi=str(phi), psi=str(psi),
                                     m_g=int(m_g[g]), bound=bound)
                    report.violations += len(bad) - 1
        return _finish(report, raise_on_violation)

    rng = make_rng(seed)
    for g, phi, psi in _triples(n, E, mode, samples, rng):
        ep_phi = induce_edge_perm(space, phi)
        ep_psi = induce_edge_perm(space, psi)
        m_g = sum(1 for e in good_pair_candidates(ep_phi, ep_psi) if g >> e & 1 and not g >> ep_phi(e) & 1)
        bound = lemma34_bound(n, r, unshared_two_cycles(phi, psi))
        report.instances_checked += 1
        if bound > 0:
            report.ratio(m_g / bound)
        if m_g > bound:
            report.violation(G=space.mask_hex(g), phi=str(phi), psi=str(psi), m_g=m_g, bound=bound)
    return _finish(report, raise_on_violation)


def _two_cycle_masks(n: int):
    """Every permutation of ``[n]`` as a bitmask over the pairs it swaps."""
    pair_bit = {p: i for i, p in enumerate(itertools.combinations(range(1, n + 1), 2))}
    perms = list(all_perms(n))
    masks = np.array([sum(1 << pair_bit[c] for c in p.two_cycles()) for p in perms], dtype=np.uint64)
    return perms, masks


def check_lemma_3_7(n: int, raise_on_violation: bool = True) -> LemmaReport:
    """Permutations sharing at least ``n/2 - A`` 2-cycles with a fixed one
    number at most ``n**(2A)``, for every integer ``0 <= A <= n/2``."""
    if n < 1:
        raise ValidationError("n must be positive")
    if n > 7:
        raise CapacityError("lemma 3.7 sweeps are capped at n <= 7")
    perms, masks = _two_cycle_masks(n)
    shared = np.bitwise_count(masks[:, None] & masks[None, :]).astype(np.int64)
    report = LemmaReport("3.7", ASSERTED, parameters={"n": n})
    for A in range(0, n // 2 + 1):
        counts = (2 * shared >= n - 2 * A).sum(axis=1)
        bound = n ** (2 * A)
        report.instances_checked += len(perms)
        report.ratio(float(counts.max()) / bound)
        bad = np.flatnonzero(counts > bound)
        if len(bad):
            report.violation(phi0=str(perms[int(bad[0])]), A=A, count=int(counts[bad[0]]), bound=bound)
            report.violations += len(bad) - 1
    return _finish(report, raise_on_violation)


def edge_two_cycles(ep) -> int:
    t = ep.table
    return sum(1 for i, j in enumerate(t) if i < j and t[j] == i)


def check_lemma_3_3(
    n: int,
    r: int,
    delta: float,
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
) -> LemmaReport:
    """Report-only: permutations whose edge action has at least
    ``C(n, r)/2 - delta`` 2-cycles but which themselves have fewer than
    ``n/2 - r * delta**(1/r)`` 2-cycles.

    ``S_n`` is swept exhaustively for ``n <= 8``, sampled otherwise.
    """
    if delta < 1:
        raise ValidationError("delta must be at least 1")
    space = edge_space(n, r)
    exhaustive = n <= 8
    report = LemmaReport(
        "3.3", REPORT_ONLY,
        parameters={"n": n, "r": r, "delta": delta, "exhaustive": exhaustive},
        seed=None if exhaustive else seed,
    )
    if exhaustive:
        perms = all_perms(n)
    else:
        rng = make_rng(seed)
        perms = (_random_perm(rng, n) for _ in range(samples))
    threshold = binom(n, r) / 2 - delta
    needed = n / 2 - r * delta ** (1 / r)
    skipped = 0
    min_margin = None
    for psi in perms:
        if edge_two_cycles(induce_edge_perm(space, psi)) < threshold:
            skipped += 1
            continue
        have = len(psi.two_cycles())
        margin = have - needed
        min_margin = margin if min_margin is None else min(min_margin, margin)
        report.instances_checked += 1
        if margin < 0:
            report.violation(psi=str(psi), two_cycles=have, needed=needed)
    report.parameters["skipped_hypothesis_false"] = skipped
    report.parameters["min_margin"] = min_margin
    return report


LEMMA_IDS = ("2.3", "2.4", "2.6", "eq2", "2.7", "3.2", "3.3", "3.4", "3.7")


def run_check(
    lemma_id: str,
    n: int,
    r: int | None = None,
    mode: str = "exhaustive",
    samples: int = DEFAULT_SAMPLES,
    seed: int = DEFAULT_SEED,
    delta: float | None = None,
    sweep: bool = False,
    raise_on_violation: bool = True,
) -> LemmaReport:
    """Uniform entry point used by the command line."""
    if lemma_id not in LEMMA_IDS:
        raise ValidationError(f"unknown lemma id {lemma_id!r}; choose from {LEMMA_IDS}")
    if lemma_id != "3.7" and r is None:
        raise ValidationError(f"lemma {lemma_id} needs r")
    kw = {"raise_on_violation": raise_on_violation}
    if lemma_id == "2.3":
        return check_lemma_2_3(n, r, **kw)
    if lemma_id == "2.4":
        return check_lemma_2_4(n, r, sweep, **kw)
    if lemma_id == "2.6":
        return check_lemma_2_6(n, r, **kw)
    if lemma_id == "eq2":
        return check_eq_2(n, r, sweep, **kw)
    if lemma_id == "2.7":
        return check_prop_2_7(n, r, seed=seed, **kw)
    if lemma_id == "3.2":
        return check_lemma_3_2(n, r, mode, samples, seed, **kw)
    if lemma_id == "3.4":
        return check_lemma_3_4(n, r, mode, samples, seed, **kw)
    if lemma_id == "3.7":
        return check_lemma_3_7(n, **kw)
    if delta is None:
        raise ValidationError("lemma 3.3 needs delta")
    return check_lemma_3_3(n, r, delta, samples, seed)
