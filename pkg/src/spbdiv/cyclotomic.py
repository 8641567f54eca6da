"""Exact arithmetic in cyclotomic fields Q(zeta_m).

Scalars are polynomial residues modulo the m-th cyclotomic polynomial with
Fraction coefficients.  Matrices of roots of unity (the Weil representation)
are kept in the group ring Z[C_m] as integer arrays of shape (rows, cols, m)
and only reduced modulo Phi_m when compared.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm

import numpy as np


@lru_cache(maxsize=None)
def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Integer coefficients of Phi_m, lowest degree first."""
    num = [-1] + [0] * (m - 1) + [1]
    for d in range(1, m):
        if m % d == 0:
            num = _exact_div(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


def _exact_div(num: list[int], den: list[int]) -> list[int]:
    num = list(num)
    q = [0] * (len(num) - len(den) + 1)
    for i in range(len(q) - 1, -1, -1):
        c = num[i + len(den) - 1] // den[-1]
        q[i] = c
        for j, d in enumerate(den):
            num[i + j] -= c * d
    assert not any(num), "inexact polynomial division"
    return q


def euler_phi(m: int) -> int:
    return len(cyclotomic_polynomial(m)) - 1


def _reduce(poly: list, m: int) -> list:
    """Reduce a coefficient list (lowest first) modulo Phi_m."""
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    poly = list(poly) + [0] * max(0, deg - len(poly))
    for i in range(len(poly) - 1, deg - 1, -1):
        c = poly[i]
        if c:
            for j in range(deg + 1):
                poly[i - deg + j] -= c * phi[j]
    return poly[:deg]


class CyclotomicNumber:
    """Element of Q(zeta_m), zeta_m = e(1/m)."""

    __slots__ = ("m", "coeffs")

    def __init__(self, m: int, coeffs=()):
        self.m = m
        c = [Fraction(x) for x in coeffs]
        self.coeffs = tuple(Fraction(x) for x in _reduce(c, m))

    @classmethod
    def rational(cls, x, m: int = 1) -> "CyclotomicNumber":
        return cls(m, [Fraction(x)])

    @classmethod
    def root_of_unity(cls, x, m: int | None = None) -> "CyclotomicNumber":
        """e(x) for rational x, in conductor ``m`` (default: the denominator of x)."""
        x = Fraction(x)
        if m is None:
            m = x.denominator
        if m % x.denominator:
            raise ValueError(f"e({x}) is not in Q(zeta_{m})")
        k = (x.numerator * (m // x.denominator)) % m
        c = [0] * (k + 1)
        c[k] = 1
        return cls(m, c)

    def lift(self, M: int) -> "CyclotomicNumber":
        if M % self.m:
            raise ValueError(f"cannot embed Q(zeta_{self.m}) into Q(zeta_{M})")
        if M == self.m:
            return self
        s = M // self.m
        poly = [Fraction(0)] * (s * len(self.coeffs) + 1)
        for i, c in enumerate(self.coeffs):
            poly[i * s] = c
        return CyclotomicNumber(M, poly)

    def _common(self, other):
        if not isinstance(other, CyclotomicNumber):
            other = CyclotomicNumber.rational(other, self.m)
        M = lcm(self.m, other.m)
        return self.lift(M), other.lift(M), M

    def __add__(self, other):
        a, b, M = self._common(other)
        return CyclotomicNumber(M, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.m, [-x for x in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, CyclotomicNumber) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, CyclotomicNumber):
            o = Fraction(other)
            return CyclotomicNumber(self.m, [x * o for x in self.coeffs])
        a, b, M = self._common(other)
        prod = [Fraction(0)] * (2 * len(a.coeffs))
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        prod[i + j] += x * y
        return CyclotomicNumber(M, prod)

    __rmul__ = __mul__

    def inverse(self) -> "CyclotomicNumber":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero in a cyclotomic field")
        from .linalg import solve

        n = len(self.coeffs)
        cols = []
        for i in range(n):
            basis = [0] * (i + 1)
            basis[i] = 1
            cols.append((self * CyclotomicNumber(self.m, basis)).coeffs)
        M = [[cols[j][i] for j in range(n)] for i in range(n)]
        sol = solve(M, [Fraction(int(i == 0)) for i in range(n)])
        return CyclotomicNumber(self.m, sol)

    def __truediv__(self, other):
        if not isinstance(other, CyclotomicNumber):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = CyclotomicNumber.rational(other, self.m)
        if not isinstance(other, CyclotomicNumber):
            return NotImplemented
        a, b, _ = self._common(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        c = self.minimal()
        return hash((c.m, c.coeffs))

    def minimal(self) -> "CyclotomicNumber":
        """The same number in the smallest conductor dividing m that contains it."""
        for d in sorted(d for d in range(1, self.m + 1) if self.m % d == 0):
            # try representing in Q(zeta_d): compare after lifting a projection
            cand = _try_descend(self, d)
            if cand is not None:
                return cand
        return self

    def root_of_unity_exponent(self) -> Fraction | None:
        """x in [0,1) with self == e(x), or None."""
        M = lcm(2, self.m)
        for k in range(M):
            if self == CyclotomicNumber.root_of_unity(Fraction(k, M), M):
                return Fraction(k, M)
        return None

    def to_json(self) -> dict:
        return {"conductor": self.m, "coeffs": [f"{c.numerator}/{c.denominator}" for c in self.coeffs]}

    def __repr__(self):
        terms = [f"{c}*z^{i}" for i, c in enumerate(self.coeffs) if c]
        return f"Cyc{self.m}(" + (" + ".join(terms) or "0") + ")"


def _try_descend(x: CyclotomicNumber, d: int):
    if d == x.m:
        return x
    s = x.m // d
    # an element of Q(zeta_d) lifted to Q(zeta_m) only uses powers zeta_m^{s i}
    # after reduction when expressed in the lifted power basis; test by solving
    phi_d = euler_phi(d)
    basis = [CyclotomicNumber.root_of_unity(Fraction(i, d), d).lift(x.m) for i in range(phi_d)]
    from .linalg import solve

    cols = [list(b.coeffs) for b in basis]
    M = [[cols[j][i] for j in range(phi_d)] for i in range(len(x.coeffs))]
    sol = solve(M, list(x.coeffs))
    if sol is None:
        return None
    return CyclotomicNumber(d, sol)


# --- group-ring matrices -------------------------------------------------------

def reduce_group_ring(arr: np.ndarray, m: int) -> np.ndarray:
    """Map integer group-ring coefficients (last axis of length m) to the power
    basis of Q(zeta_m) (last axis of length phi(m))."""
    phi = cyclotomic_polynomial(m)
    deg = len(phi) - 1
    a = np.array(arr, dtype=object).copy()
    for i in range(m - 1, deg - 1, -1):
        c = a[..., i].copy()
        if np.any(c != 0):
            for j in range(deg + 1):
                if phi[j]:
                    a[..., i - deg + j] = a[..., i - deg + j] - c * phi[j]
    return a[..., :deg]


class GroupRingMatrix:
    """Matrix with entries (1/den) * sum_k num[i, j, k] zeta_m^k."""

    def __init__(self, num: np.ndarray, m: int, den: int = 1):
        self.num = np.asarray(num, dtype=np.int64)
        self.m = m
        self.den = den

    @property
    def shape(self):
        return self.num.shape[:2]

    @classmethod
    def from_exponents(cls, exps: np.ndarray, m: int, den: int = 1, mask=None) -> "GroupRingMatrix":
        """Entry (i, j) = zeta_m^{exps[i, j]} (or 0 where mask is False)."""
        n1, n2 = exps.shape
        num = np.zeros((n1, n2, m), dtype=np.int64)
        ii, jj = np.indices(exps.shape)
        vals = np.ones(exps.shape, dtype=np.int64) if mask is None else mask.astype(np.int64)
        num[ii, jj, exps % m] = vals
        return cls(num, m, den)

    @classmethod
    def permutation(cls, perm: list[int], m: int) -> "GroupRingMatrix":
        n = len(perm)
        num = np.zeros((n, n, m), dtype=np.int64)
        for i, j in enumerate(perm):
            num[j, i, 0] = 1
        return cls(num, m)

    @classmethod
    def identity(cls, n: int, m: int) -> "GroupRingMatrix":
        return cls.permutation(list(range(n)), m)

    def __matmul__(self, other: "GroupRingMatrix") -> "GroupRingMatrix":
        assert self.m == other.m
        m = self.m
        n1, _ = self.shape
        _, n2 = other.shape
        out = np.zeros((n1, n2, m), dtype=np.int64)
        A, B = self.num, other.num
        nzA = [a for a in range(m) if A[:, :, a].any()]
        nzB = [b for b in range(m) if B[:, :, b].any()]
        for a in nzA:
            for b in nzB:
                out[:, :, (a + b) % m] += A[:, :, a] @ B[:, :, b]
        bound = np.abs(out).max() if out.size else 0
        if bound > 2 ** 60:
            raise OverflowError("group-ring matrix entries too large for int64")
        return GroupRingMatrix(out, m, self.den * other.den)

    def reduced(self) -> np.ndarray:
        return reduce_group_ring(self.num, self.m)

    def equals(self, other: "GroupRingMatrix") -> bool:
        assert self.m == other.m
        lhs = reduce_group_ring(self.num, self.m) * other.den
        rhs = reduce_group_ring(other.num, self.m) * self.den
        return bool(np.all(lhs == rhs))

    def entry(self, i: int, j: int) -> CyclotomicNumber:
        return CyclotomicNumber(self.m, [Fraction(int(c), self.den) for c in self.num[i, j]])

    def mod_p(self, p: int, omega: int) -> np.ndarray:
        """Image under zeta -> omega in F_p, with the denominator dropped."""
        powers = np.array([pow(omega, k, p) for k in range(self.m)], dtype=np.int64)
        return np.tensordot(self.num % p, powers, axes=([2], [0])) % p


def prime_with_root_of_unity(m: int, start: int = 2 ** 30) -> tuple[int, int]:
    """A prime p = 1 mod m (p > start) and an element of exact order m in F_p."""
    p = start + (1 - start) % m
    while True:
        if p > 2 and _is_prime(p):
            for g in range(2, p):
                omega = pow(g, (p - 1) // m, p)
                if all(pow(omega, m // q, p) != 1 for q in _prime_divisors(m)):
                    return p, omega
        p += m


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % a == 0:
            return n == a
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _prime_divisors(n: int) -> list[int]:
    out, p = [], 2
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out
