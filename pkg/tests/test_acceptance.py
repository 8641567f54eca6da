"""Acceptance criteria, one test each.

Every test records a PASS/FAIL line (printed in the terminal summary) before
asserting.  Criteria that fail on the mathematics are marked strict xfail with
the reason; a silent fix would turn them into XPASS and break the run.
"""
import random
import time
from fractions import Fraction

import pytest

from conftest import divisor_pairs, record
from spbdiv.cusps import cusp_classes, enumerate_types, types_count_formula
from spbdiv.divisors import (
    BoundaryDivisor,
    boundary_divisor_of_invariant,
    characterization_check,
    is_special,
    special_divisor,
    spbdiv_dimension,
    type_view,
)
from spbdiv.fqm import DiscriminantForm, enumerate_self_dual_isotropic, is_self_dual_isotropic, max_form_order
from spbdiv.invariants import (
    char_vector,
    invariant_space_dim,
    is_invariant,
    negation_permutation,
    types_span,
    types_span_formula,
    weil_S,
    weil_T,
)
from spbdiv.qeta import cross_validate_boundary, eta_identity_check, relation_lift_check

PRIME_POWERS = [2, 4, 8, 9, 27, 25]


def prime_power_pairs(values):
    return [(N, Np) for N in values for Np in range(1, N + 1) if N % Np == 0 and (Np == 1 or _same_prime(N, Np))]


def _same_prime(N, Np):
    p = min(d for d in range(2, N + 1) if N % d == 0)
    return all(q % p == 0 for q in (N, Np))


@pytest.mark.xfail(strict=True, reason="closed formula counts star-mixed local types when two primes divide N'")
def test_criterion_01_type_count():
    t0 = time.time()
    pairs = sorted(set(divisor_pairs(24)) | set(prime_power_pairs(PRIME_POWERS)))
    bad = [(N, Np) for N, Np in pairs if len(enumerate_types(DiscriminantForm(N, Np))) != types_count_formula(N, Np)]
    elapsed = time.time() - t0
    ok = not bad and elapsed < 60
    record(1, ok, f"{len(pairs) - len(bad)}/{len(pairs)} pairs match, {elapsed:.1f}s; mismatches {bad}")
    assert ok


def test_criterion_02_self_duality():
    pairs = [(N, Np) for N, Np in divisor_pairs(36) if N * Np <= 36]
    bad = []
    for N, Np in pairs:
        form = DiscriminantForm(N, Np)
        for H, _ in enumerate_types(form):
            if not (is_self_dual_isotropic(H) and H.order ** 2 == N * N * Np * Np):
                bad.append((N, Np))
    record(2, not bad, f"{len(pairs)} forms, failures {bad}")
    assert not bad


@pytest.mark.xfail(strict=True, reason="span formula assumes the star-mixed types of criterion 1")
def test_criterion_03_span_dimension():
    t0 = time.time()
    formula_bad, iso_bad = [], []
    pairs = divisor_pairs(24)
    for N, Np in pairs:
        form = DiscriminantForm(N, Np)
        dim = types_span(form)[0]
        if dim != types_span_formula(N, Np):
            formula_bad.append((N, Np, dim, types_span_formula(N, Np)))
        if dim != spbdiv_dimension(form):
            iso_bad.append((N, Np))
    elapsed = time.time() - t0
    ok = not formula_bad and not iso_bad and elapsed < 120
    record(3, ok, f"{elapsed:.1f}s; span != spbdiv at {iso_bad}; span != formula (N,N',span,formula) at {formula_bad}")
    assert ok


def test_criterion_04_relation_kernel():
    bad = []
    values = [n for n in range(2, 28) if len({p for p in range(2, n + 1) if n % p == 0 and
                                               all(p % q for q in range(2, p))}) == 1]
    for N in values:
        for Np, want in [(d, 1 if d > 1 else 0) for d in range(1, N + 1) if N % d == 0]:
            dim, kernel = types_span(DiscriminantForm(N, Np))
            if len(kernel) != want:
                bad.append((N, Np, len(kernel)))
    record(4, not bad, f"prime powers {values}; failures {bad}")
    assert not bad


@pytest.mark.xfail(strict=True, reason="N'=1 gives equality for every N; equality fails at (6,6) and (12,2)")
def test_criterion_05_squarefree():
    limit = max_form_order()
    eq_bad, strict_bad, skipped = [], [], []
    for N in (1, 2, 3, 5, 6, 12):
        for Np in [d for d in range(1, N + 1) if N % d == 0 and all(d % (k * k) for k in range(2, d + 1))]:
            form = DiscriminantForm(N, Np)
            if form.order > limit:
                skipped.append((N, Np))
                continue
            span, inv = types_span(form)[0], invariant_space_dim(form)
            if span != inv:
                eq_bad.append((N, Np, span, inv))
    for N in (4, 8, 9):
        for Np in [d for d in range(1, N + 1) if N % d == 0]:
            form = DiscriminantForm(N, Np)
            if form.order > limit:
                skipped.append((N, Np))
                continue
            span, inv = types_span(form)[0], invariant_space_dim(form)
            if not span < inv:
                strict_bad.append((N, Np, span, inv))
    ok = not eq_bad and not strict_bad
    record(5, ok, f"equality fails (N,N',span,inv) {eq_bad}; strictness fails {strict_bad}; skipped {skipped}")
    assert ok


def test_criterion_06_weil_sanity():
    pairs = [(N, Np) for N, Np in divisor_pairs(12) if N * Np <= 12]
    bad = []
    for N, Np in pairs:
        form = DiscriminantForm(N, Np)
        S, T = weil_S(form), weil_T(form)
        S2 = S @ S
        ST = S @ T
        if not (S2.equals(negation_permutation(form)) and (ST @ ST @ ST).equals(S2)):
            bad.append((N, Np, "relations"))
        if not all(is_invariant(char_vector(H)) for H in enumerate_self_dual_isotropic(form)):
            bad.append((N, Np, "invariance"))
    record(6, not bad, f"{len(pairs)} forms; failures {bad}")
    assert not bad


@pytest.mark.xfail(strict=True, reason="the displayed exponents are wrong for r >= 2; the r = 1 cases hold")
def test_criterion_07_eta_identity():
    t0 = time.time()
    results = {}
    for p, r in [(2, 1), (3, 1), (5, 1), (2, 2)]:
        res = eta_identity_check(p, r, terms=50)
        n = p ** r
        want = Fraction(n - n // p, 48)
        results[(p, r)] = res.holds and res.constant_exponent() == want
    elapsed = time.time() - t0
    ok = all(results.values()) and elapsed < 60
    record(7, ok, f"{elapsed:.1f}s; " + ", ".join(f"{k}: {'holds' if v else 'fails'}" for k, v in results.items()))
    assert ok


def test_criterion_08_relation_lift():
    cases = [(2, 1, 1), (3, 1, 1), (2, 2, 1)]
    results = {c: relation_lift_check(*c, terms=30) for c in cases}
    ok = all(results.values())
    record(8, ok, ", ".join(f"{k}: {v}" for k, v in results.items()))
    assert ok


def test_criterion_09_cross_validation():
    bad, values = [], set()
    for N, Np in [(1, 1), (2, 1), (4, 1), (2, 2)]:
        form = DiscriminantForm(N, Np)
        for H, _ in enumerate_types(form):
            cv = cross_validate_boundary(form, H)
            if not cv.constant:
                bad.append((N, Np, H.canonical_generators))
            values.add(cv.value)
    record(9, not bad, f"ratios {sorted(str(v) for v in values)}; non-constant {bad}")
    assert not bad


def _perturbations(count, rng):
    forms = [DiscriminantForm(2, 1), DiscriminantForm(4, 1), DiscriminantForm(6, 1), DiscriminantForm(8, 2)]
    out = []
    while len(out) < count:
        form = rng.choice(forms)
        classes = cusp_classes(form)
        types = [H for H, _ in enumerate_types(form)]
        base = BoundaryDivisor(form)
        for H in rng.sample(types, k=min(2, len(types))):
            base = base + special_divisor(form, H).scale(rng.randint(-2, 2))
        shared = [S for S in classes if sum(T.type == S.type for T in classes) > 1]
        S = rng.choice(shared)
        d = base + BoundaryDivisor(form, {S: Fraction(rng.choice([-2, -1, 1, 2, Fraction(1, 2)]))})
        if type_view(d) is None:
            out.append((form, d))
    return out


def test_criterion_10_divisor_converse():
    t0 = time.time()
    rng = random.Random(10)
    problems = []
    forms = [DiscriminantForm(N, Np) for N, Np in divisor_pairs(6)] + [DiscriminantForm(8, 2), DiscriminantForm(12, 1)]
    for form in forms:
        for H, _ in enumerate_types(form):
            d = special_divisor(form, H)
            cert = is_special(form, d)
            if cert is None or boundary_divisor_of_invariant(form, cert.invariant_vector).values() != type_view(d).values():
                problems.append(("Z(H) rejected", form, H.canonical_generators))
    for form, d in _perturbations(50, rng):
        if is_special(form, d) is not None:
            problems.append(("perturbation accepted", form))
    form = DiscriminantForm(2, 2)
    classes = cusp_classes(form)
    unbalanced = 0
    while unbalanced < 20:
        d = BoundaryDivisor(form, {S: Fraction(rng.randint(-3, 3)) for S in classes})
        rep = characterization_check(form, d)
        if rep.conditions["balanced"]:
            continue
        unbalanced += 1
        if rep.special:
            problems.append(("unbalanced accepted", form))
    elapsed = time.time() - t0
    ok = not problems and elapsed < 60
    record(10, ok, f"{len(forms)} forms, 50 perturbations, 20 unbalanced at N=N'=2, {elapsed:.1f}s; problems {problems}")
    assert ok


def test_criterion_11_n1_characterization():
    rng = random.Random(11)
    problems = []
    checked = 0
    for N in (2, 4, 12):
        form = DiscriminantForm(N, 1)
        classes = cusp_classes(form)
        candidates = []
        for T in {S.type for S in classes}:
            candidates.append(BoundaryDivisor(form, {S: 1 for S in classes if S.type == T}))
        candidates += [BoundaryDivisor(form, {S: 1}) for S in classes]
        negatives = 0
        while negatives < 20:
            d = BoundaryDivisor(form, {S: Fraction(rng.randint(-3, 3)) for S in classes})
            if not characterization_check(form, d).all_conditions:
                candidates.append(d)
                negatives += 1
        for d in candidates:
            rep = characterization_check(form, d)
            checked += 1
            if not rep.consistent():
                problems.append((N, d.to_json()))
    record(11, not problems, f"{checked} divisors checked; inconsistent {len(problems)}")
    assert not problems
