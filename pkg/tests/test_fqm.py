from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from spbdiv.errors import GuardExceeded, InvalidInput
from spbdiv.fqm import (
    DiscriminantForm,
    RationalMod1,
    element_from_matrix,
    enumerate_self_dual_isotropic,
    fraction_str,
    intersection,
    intersection_count,
    is_self_dual_isotropic,
    orthogonal_complement,
    p_primary_part,
    parse_fraction,
    prime_factors,
    subgroup_from_generators,
    subgroup_from_json,
    subgroup_sum,
    trivial_subgroup,
    whole_group,
)

from oracles import all_subgroups, closure

forms = st.sampled_from([(1, 1), (2, 1), (2, 2), (3, 3), (4, 2), (6, 2), (6, 3), (12, 6)]).map(
    lambda p: DiscriminantForm(*p))
small_forms = st.sampled_from([(2, 1), (2, 2), (3, 3), (4, 2), (6, 2)]).map(lambda p: DiscriminantForm(*p))


def elements_of(form):
    return st.tuples(st.integers(0, form.N - 1), st.integers(0, form.N - 1),
                     st.integers(0, form.Nprime - 1), st.integers(0, form.Nprime - 1))


def test_rejects_bad_levels():
    with pytest.raises(InvalidInput):
        DiscriminantForm(4, 3)
    with pytest.raises(InvalidInput):
        DiscriminantForm(0, 1)


def test_rational_mod1():
    assert RationalMod1(7, 4) == Fraction(3, 4)
    assert RationalMod1(-1, 3) == Fraction(2, 3)
    assert str(RationalMod1(2)) == "0/1"
    assert fraction_str(Fraction(-6, 4)) == "-3/2"
    assert parse_fraction("10/4") == Fraction(5, 2)


def test_prime_factors():
    assert prime_factors(360) == {2: 3, 3: 2, 5: 1}
    assert prime_factors(1) == {}


def test_encoding_is_lexicographic(small_form):
    els = list(small_form.elements())
    assert len(els) == small_form.order
    assert els == sorted(els)
    for code, g in enumerate(els):
        assert small_form.encode(g) == code


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_bilinear_is_polarization(data):
    form = data.draw(forms)
    g = data.draw(elements_of(form))
    h = data.draw(elements_of(form))
    assert form.bilinear(g, h) == RationalMod1(form.q(form.add(g, h)) - form.q(g) - form.q(h))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_matrix_identification_respects_q(data):
    """q of the image of a dual matrix X is -N' det X mod 1."""
    form = data.draw(forms)
    N, Np = form.N, form.Nprime
    a, c, d = (Fraction(data.draw(st.integers(-20, 20)), Np) for _ in range(3))
    b = Fraction(data.draw(st.integers(-20, 20)), N)
    g = element_from_matrix(form, a, b, c, d)
    assert form.q(g) == RationalMod1(-Np * (a * d - b * c))


def test_matrix_identification_is_surjective_with_kernel_L(small_form):
    N, Np = small_form.N, small_form.Nprime
    image = {element_from_matrix(small_form, Fraction(i, Np), Fraction(j, N), Fraction(k, Np), Fraction(l, Np))
             for i in range(Np) for j in range(N) for k in range(N) for l in range(Np)}
    assert len(image) == small_form.order
    assert element_from_matrix(small_form, 1, 1, N // Np, 1) == (0, 0, 0, 0)
    with pytest.raises(InvalidInput):
        element_from_matrix(small_form, 0, Fraction(1, 2 * N), 0, 0)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_subgroup_matches_closure(data):
    form = data.draw(forms)
    gens = data.draw(st.lists(elements_of(form), max_size=3))
    H = subgroup_from_generators(form, gens)
    assert set(H.elements()) == closure(form, [form.element(*g) for g in gens])
    assert H.order == len(H.codes)
    assert subgroup_from_json(H.to_json()) == H


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_lattice_operations(data):
    form = data.draw(small_forms)
    H = subgroup_from_generators(form, data.draw(st.lists(elements_of(form), max_size=2)))
    K = subgroup_from_generators(form, data.draw(st.lists(elements_of(form), max_size=2)))
    assert set(intersection(H, K).elements()) == set(H.elements()) & set(K.elements())
    assert intersection_count(H, K) == len(set(H.elements()) & set(K.elements()))
    assert set(subgroup_sum(H, K).elements()) == closure(form, H.elements() + K.elements())
    perp = {g for g in form.elements() if all(form.bilinear(g, h) == 0 for h in H.elements())}
    assert set(orthogonal_complement(H).elements()) == perp
    assert H.order * orthogonal_complement(H).order == form.order


def test_primary_decomposition():
    form = DiscriminantForm(12, 6)
    H = subgroup_from_generators(form, [[1, 5, 2, 3], [0, 4, 1, 0]])
    parts = [p_primary_part(H, p) for p in (2, 3)]
    assert subgroup_sum(*parts) == H
    assert parts[0].order * parts[1].order == H.order
    with pytest.raises(InvalidInput):
        p_primary_part(H, 5)


@pytest.mark.parametrize("N,Np", [(1, 1), (2, 1), (3, 1), (2, 2), (4, 1), (3, 3), (4, 2), (6, 1)])
def test_self_dual_isotropic_against_all_subgroups(N, Np):
    form = DiscriminantForm(N, Np)
    brute = {H for H in all_subgroups(form)
             if len(H) ** 2 == form.order and all(form.q(g) == 0 for g in H)}
    found = {frozenset(H.elements()) for H in enumerate_self_dual_isotropic(form)}
    assert found == brute
    assert all(is_self_dual_isotropic(H) for H in enumerate_self_dual_isotropic(form))


def test_trivial_and_whole():
    form = DiscriminantForm(4, 2)
    assert trivial_subgroup(form).order == 1
    assert whole_group(form).order == form.order
    assert not is_self_dual_isotropic(whole_group(form))
    assert orthogonal_complement(trivial_subgroup(form)) == whole_group(form)


def test_guard(monkeypatch):
    with pytest.raises(GuardExceeded):
        enumerate_self_dual_isotropic(DiscriminantForm(4, 2), max_order=10)
    monkeypatch.setenv("MAX_FORM_ORDER", "10")
    with pytest.raises(GuardExceeded):
        enumerate_self_dual_isotropic(DiscriminantForm(4, 4))


def test_worked_examples():
    f21, f41, f42 = DiscriminantForm(2, 1), DiscriminantForm(4, 1), DiscriminantForm(4, 2)
    assert element_from_matrix(f21, 0, 0, 0, 0) == (0, 0, 0, 0)
    assert element_from_matrix(f21, 0, Fraction(1, 2), 0, 0) == (1, 0, 0, 0)
    assert element_from_matrix(f42, Fraction(1, 2), 0, 0, 0) == (0, 0, 1, 0)
    assert f41.q((1, 0, 0, 0)) == 0
    assert f41.q((1, 1, 0, 0)) == Fraction(1, 4)
    assert f42.q((0, 0, 1, 1)) == Fraction(1, 2)
    assert f41.bilinear((1, 0, 0, 0), (0, 1, 0, 0)) == Fraction(1, 4)
    assert subgroup_from_generators(f21, [(1, 0, 0, 0), (1, 0, 0, 0)]) == subgroup_from_generators(f21, [(1, 0, 0, 0)])
    assert subgroup_from_generators(f21, [(1, 0, 0, 0), (0, 1, 0, 0)]) == whole_group(f21)
    assert intersection_count(subgroup_from_generators(f21, [(1, 0, 0, 0)]),
                              subgroup_from_generators(f21, [(0, 1, 0, 0)])) == 1
    f22 = DiscriminantForm(2, 2)
    assert orthogonal_complement(whole_group(f22)) == trivial_subgroup(f22)
    assert is_self_dual_isotropic(trivial_subgroup(DiscriminantForm(1, 1)))
    assert is_self_dual_isotropic(subgroup_from_generators(f21, [(1, 0, 0, 0)]))
    assert not is_self_dual_isotropic(subgroup_from_generators(f21, [(1, 1, 0, 0)]))
    assert len(enumerate_self_dual_isotropic(DiscriminantForm(1, 1))) == 1
    assert [H.canonical_generators for H in enumerate_self_dual_isotropic(f21)] == [[(1, 0, 0, 0)], [(0, 1, 0, 0)]]
    assert len(enumerate_self_dual_isotropic(f22)) == 6
    assert p_primary_part(trivial_subgroup(f42), 2) == trivial_subgroup(f42)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_canonical_form_ignores_generating_set(data):
    form = DiscriminantForm(12, 6)
    base = subgroup_from_generators(form, [(2, 3, 1, 0), (0, 6, 0, 3)])
    els = base.elements()
    extra = data.draw(st.lists(st.sampled_from(els), max_size=4))
    k = data.draw(st.sampled_from([1, 5, 7, 11]))
    gens = [form.scale(k, (2, 3, 1, 0)), (0, 6, 0, 3)] + extra
    order = data.draw(st.permutations(gens))
    assert subgroup_from_generators(form, order) == base


@pytest.mark.parametrize("N,Np", [(N, Np) for N in range(1, 13) for Np in range(1, N + 1) if N % Np == 0 and N * Np <= 12])
def test_complement_exhaustive(N, Np):
    form = DiscriminantForm(N, Np)
    for elems in all_subgroups(form):
        H = subgroup_from_generators(form, elems)
        perp = orthogonal_complement(H)
        assert H.order * perp.order == form.order
        assert orthogonal_complement(perp) == H


@pytest.mark.parametrize("N,Np", [(N, Np) for N in range(1, 13) for Np in range(1, N + 1)
                                  if N % Np == 0 and (N * Np) ** 2 <= 1296])
def test_primary_reconstruction_of_self_dual(N, Np):
    form = DiscriminantForm(N, Np)
    primes = sorted(prime_factors(N))
    for H in enumerate_self_dual_isotropic(form):
        assert H.order ** 2 == form.order
        if primes:
            total = p_primary_part(H, primes[0])
            for p in primes[1:]:
                total = subgroup_sum(total, p_primary_part(H, p))
            assert total == H
