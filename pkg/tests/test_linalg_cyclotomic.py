from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spbdiv.cyclotomic import CyclotomicNumber, GroupRingMatrix, cyclotomic_polynomial, euler_phi, prime_with_root_of_unity
from spbdiv.linalg import nullspace, primitive_integer_vector, rank, rank_mod_p, rref, solve

small_int_matrices = st.integers(1, 5).flatmap(
    lambda r: st.integers(1, 5).flatmap(
        lambda c: st.lists(st.lists(st.integers(-4, 4), min_size=c, max_size=c), min_size=r, max_size=r)))


@settings(max_examples=80, deadline=None)
@given(small_int_matrices)
def test_rank_and_nullspace(M):
    assert rank(M) == np.linalg.matrix_rank(np.array(M, dtype=float))
    ker = nullspace(M)
    assert len(ker) == len(M[0]) - rank(M)
    for v in ker:
        assert all(sum(Fraction(a) * x for a, x in zip(row, v)) == 0 for row in M)


@settings(max_examples=60, deadline=None)
@given(small_int_matrices, st.data())
def test_solve(M, data):
    x = [Fraction(data.draw(st.integers(-3, 3))) for _ in M[0]]
    b = [sum(a * xi for a, xi in zip(row, x)) for row in M]
    sol = solve(M, b)
    assert sol is not None
    assert [sum(a * s for a, s in zip(row, sol)) for row in M] == b


def test_inconsistent_system():
    assert solve([[1, 1], [2, 2]], [1, 3]) is None
    R, piv = rref([[2, 4], [1, 2]])
    assert piv == [0] and R[0] == [1, 2]
    assert primitive_integer_vector([Fraction(1, 2), Fraction(-3, 4)]) == [2, -3]


def test_rank_mod_p():
    p = 7
    assert rank_mod_p(np.array([[1, 2], [2, 4]], dtype=np.int64), p) == 1
    assert rank_mod_p(np.array([[1, 0], [0, 7]], dtype=np.int64), p) == 1


@pytest.mark.parametrize("m,expected", [(1, (-1, 1)), (4, (1, 0, 1)), (6, (1, -1, 1)), (12, (1, 0, -1, 0, 1))])
def test_cyclotomic_polynomials(m, expected):
    assert cyclotomic_polynomial(m) == expected
    assert euler_phi(m) == len(expected) - 1


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([3, 4, 5, 8, 12]), st.lists(st.integers(-3, 3), min_size=1, max_size=6))
def test_field_arithmetic(m, coeffs):
    x = CyclotomicNumber(m, coeffs)
    if not x.is_zero():
        assert x * x.inverse() == 1
    zeta = CyclotomicNumber.root_of_unity(Fraction(1, m))
    power = CyclotomicNumber.rational(1, m)
    for _ in range(m):
        power = power * zeta
    assert power == 1
    assert (x + x) - x == x


def test_roots_of_unity():
    z = CyclotomicNumber.root_of_unity(Fraction(3, 8))
    assert z.root_of_unity_exponent() == Fraction(3, 8)
    assert CyclotomicNumber.root_of_unity(Fraction(1, 2)) == -1
    assert CyclotomicNumber.root_of_unity(Fraction(1, 3)).lift(12) == CyclotomicNumber.root_of_unity(Fraction(4, 12))
    assert CyclotomicNumber.rational(2, 6).root_of_unity_exponent() is None
    assert hash(CyclotomicNumber.root_of_unity(Fraction(1, 4)).lift(8)) == hash(CyclotomicNumber.root_of_unity(Fraction(1, 4)))


def test_group_ring_matrix():
    m = 4
    A = GroupRingMatrix.from_exponents(np.array([[1, 3], [0, 2]]), m)
    I = GroupRingMatrix.identity(2, m)
    assert (A @ I).equals(A)
    p, omega = prime_with_root_of_unity(m)
    assert (p - 1) % m == 0 and pow(omega, m, p) == 1 and pow(omega, m // 2, p) != 1
    assert A.entry(0, 0) == CyclotomicNumber.root_of_unity(Fraction(1, 4))
