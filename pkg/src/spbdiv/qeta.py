"""Formal expansions of eta quotients.

A series is e(prefactor) * q^lead * sum_i body[i] q^(i/m), where each body
row is an integer vector in the group ring Z[C_k] (zeta_k^j at index j).
Everything coming out of eta products stays integral, so no fractions are
needed until two series are compared in Q(zeta).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

import numpy as np

from .cusps import CuspLabel, cusp_classes, cusp_parameters, enumerate_types
from .cyclotomic import CyclotomicNumber, reduce_group_ring
from .errors import GuardExceeded, InvalidInput
from .fqm import DiscriminantForm, FqmSubgroup, fraction_str, intersection_count

_INT64_SAFE = 2 ** 62


def _frac_mod1(x) -> Fraction:
    x = Fraction(x)
    return x - (x.numerator // x.denominator)


def _ring_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Product in Z[C_k] of two coefficient vectors."""
    out = np.zeros_like(a)
    for j in np.nonzero(a)[0]:
        out += a[j] * np.roll(b, j)
    return out


class PuiseuxSeries:
    __slots__ = ("m", "k", "prefactor", "lead", "body")

    def __init__(self, m: int, k: int, prefactor, lead, body):
        self.m = m
        self.k = k
        self.prefactor = _frac_mod1(prefactor)
        self.lead = Fraction(lead)
        body = np.asarray(body, dtype=object if np.asarray(body).dtype == object else np.int64)
        if body.ndim != 2 or body.shape[1] != k or body.shape[0] == 0:
            raise InvalidInput("series body must have shape (rows, k) with rows >= 1")
        # strip leading zero rows so that ``lead`` is the true valuation
        nz = np.nonzero(np.any(body != 0, axis=1))[0]
        if nz.size and nz[0] > 0:
            self.lead += Fraction(int(nz[0]), m)
            body = body[nz[0]:]
        self.body = body

    # -- basic data -------------------------------------------------------------------
    @property
    def truncation(self) -> Fraction:
        """Exponents up to and including this value are exact."""
        return self.lead + Fraction(self.body.shape[0] - 1, self.m)

    @property
    def conductor(self) -> int:
        return lcm(self.k, self.prefactor.denominator)

    def is_zero(self) -> bool:
        return not np.any(self.body != 0)

    def coefficient(self, exponent) -> CyclotomicNumber:
        e = Fraction(exponent)
        if e > self.truncation:
            raise InvalidInput(f"exponent {e} beyond truncation {self.truncation}")
        K = self.conductor
        i = (e - self.lead) * self.m
        if i < 0 or i.denominator != 1:
            return CyclotomicNumber.rational(0, K)
        row = self.body[int(i)]
        return _row_value(row, self.k, self.prefactor, K)

    def leading_coefficient(self) -> CyclotomicNumber:
        return self.coefficient(self.lead)

    def terms(self) -> dict[Fraction, CyclotomicNumber]:
        K = self.conductor
        out = {}
        for i, row in enumerate(self.body):
            if np.any(row != 0):
                out[self.lead + Fraction(i, self.m)] = _row_value(row, self.k, self.prefactor, K)
        return out

    def to_json(self) -> dict:
        K = self.conductor
        terms = []
        for e, c in self.terms().items():
            terms.append({"exp": fraction_str(e), "coeff": [fraction_str(x) for x in c.lift(K).coeffs]})
        return {"m": self.m, "conductor": K, "truncation": fraction_str(self.truncation), "terms": terms}

    # -- reshaping ----------------------------------------------------------------------
    def _regrid(self, m: int, k: int) -> np.ndarray:
        """Body on the finer grid q^(1/m) with coefficients in Z[C_k]."""
        if m % self.m or k % self.k:
            raise ValueError("can only refine grids")
        s, t = m // self.m, k // self.k
        rows = (self.body.shape[0] - 1) * s + 1
        out = np.zeros((rows, k), dtype=self.body.dtype)
        out[::s, ::t] = self.body
        return out

    def truncate(self, t) -> "PuiseuxSeries":
        t = Fraction(t)
        rows = int((t - self.lead) * self.m) + 1
        if rows < 1:
            raise InvalidInput(f"truncation {t} below the leading exponent {self.lead}")
        rows = min(rows, self.body.shape[0])
        return PuiseuxSeries(self.m, self.k, self.prefactor, self.lead, self.body[:rows])

    # -- arithmetic ---------------------------------------------------------------------
    def __mul__(self, other: "PuiseuxSeries") -> "PuiseuxSeries":
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        m, k = lcm(self.m, other.m), lcm(self.k, other.k)
        lead = self.lead + other.lead
        trunc = min(self.truncation + other.lead, other.truncation + self.lead)
        A, B = self._regrid(m, k), other._regrid(m, k)
        rows = int((trunc - lead) * m) + 1
        A, B = A[:rows], B[:rows]
        big = _needs_object(A, B)
        if big:
            A, B = A.astype(object), B.astype(object)
        out = np.zeros((rows, k), dtype=object if big else np.int64)
        for a in range(k):
            col = A[:, a]
            if not np.any(col != 0):
                continue
            for b in range(k):
                colb = B[:, b]
                if np.any(colb != 0):
                    out[:, (a + b) % k] += np.convolve(col, colb)[:rows]
        return PuiseuxSeries(m, k, self.prefactor + other.prefactor, lead, out)

    def inverse(self) -> "PuiseuxSeries":
        """Requires the leading body row to be +-zeta_k^j."""
        c0 = self.body[0]
        nz = np.nonzero(c0)[0]
        if len(nz) != 1 or abs(int(c0[nz[0]])) != 1:
            raise InvalidInput("can only invert series whose leading coefficient is a root of unity")
        j, sign = int(nz[0]), int(c0[nz[0]])
        k, L = self.k, self.body.shape[0]
        inv0 = np.zeros(k, dtype=self.body.dtype)
        inv0[(-j) % k] = sign
        out = np.zeros_like(self.body)
        out[0] = inv0
        for n in range(1, L):
            acc = np.zeros(k, dtype=self.body.dtype)
            for i in range(1, n + 1):
                if np.any(self.body[i] != 0):
                    acc += _ring_mul(self.body[i], out[n - i])
            out[n] = -_ring_mul(inv0, acc)
            if out.dtype != object and np.abs(out[n]).max(initial=0) > _INT64_SAFE // 4:
                return PuiseuxSeries(self.m, k, self.prefactor, self.lead,
                                     self.body.astype(object)).inverse()
        return PuiseuxSeries(self.m, k, -self.prefactor, -self.lead, out)

    def __pow__(self, n: int) -> "PuiseuxSeries":
        if n < 0:
            return self.inverse() ** (-n)
        result = None
        base = self
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        if result is None:
            return one_series(self.truncation - self.lead)
        return result

    def scale_root(self, x) -> "PuiseuxSeries":
        """Multiply by e(x)."""
        return PuiseuxSeries(self.m, self.k, self.prefactor + Fraction(x), self.lead, self.body)

    def reduced_rows(self, K: int) -> np.ndarray:
        """Rows as power-basis coordinates of Q(zeta_K), prefactor included."""
        if K % self.conductor:
            raise ValueError("conductor mismatch")
        t = K // self.k
        body = np.zeros((self.body.shape[0], K), dtype=object)
        body[:, ::t] = self.body
        shift = int(self.prefactor * K) % K
        body = np.roll(body, shift, axis=1)
        return reduce_group_ring(body, K)

    def equals(self, other: "PuiseuxSeries", upto=None) -> bool:
        """Termwise equality for exponents up to the common truncation (or ``upto``)."""
        t = min(self.truncation, other.truncation)
        if upto is not None:
            t = min(t, Fraction(upto))
        m = lcm(self.m, other.m)
        K = lcm(self.conductor, other.conductor)
        lo = min(self.lead, other.lead)
        if t < lo:
            return True
        if ((self.lead - other.lead) * m).denominator != 1:
            # the exponent grids never meet, so both sides must vanish below t
            return self.truncate(t).is_zero() and other.truncate(t).is_zero()
        A = _dense(self, lo, t, m, K)
        B = _dense(other, lo, t, m, K)
        return A.shape == B.shape and bool(np.all(A == B))

    def __repr__(self):
        return (f"PuiseuxSeries(m={self.m}, k={self.k}, e({self.prefactor}) q^{self.lead}, "
                f"rows={self.body.shape[0]})")


def _needs_object(A, B) -> bool:
    if A.dtype == object or B.dtype == object:
        return True
    sa = int(np.abs(A).sum())
    sb = int(np.abs(B).sum())
    return sa * sb >= _INT64_SAFE


def _row_value(row, k: int, prefactor: Fraction, K: int) -> CyclotomicNumber:
    t = K // k
    poly = [0] * K
    shift = int(prefactor * K) % K
    for j, v in enumerate(row):
        if v:
            poly[(j * t + shift) % K] += int(v)
    return CyclotomicNumber(K, poly)


def _dense(s: PuiseuxSeries, lo: Fraction, hi: Fraction, m: int, K: int) -> np.ndarray:
    """Power-basis coordinates on the grid lo + i/m (i >= 0) up to hi."""
    fine = PuiseuxSeries(m, s.k, s.prefactor, s.lead, s._regrid(m, s.k))
    red = fine.reduced_rows(K)
    rows = int((hi - lo) * m) + 1
    out = np.zeros((rows, red.shape[1]), dtype=object)
    start = int((fine.lead - lo) * m)
    for i in range(red.shape[0]):
        if start + i < rows:
            out[start + i] = red[i]
    return out


def one_series(truncation=0, m: int = 1) -> PuiseuxSeries:
    rows = int(Fraction(truncation) * m) + 1
    body = np.zeros((max(rows, 1), 1), dtype=np.int64)
    body[0, 0] = 1
    return PuiseuxSeries(m, 1, 0, 0, body)


# --- eta factors -------------------------------------------------------------------------

@dataclass(frozen=True)
class EtaFactor:
    """eta(alpha z + beta) ** exponent."""

    alpha: Fraction
    beta: Fraction
    exponent: int = 1

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        object.__setattr__(self, "beta", Fraction(self.beta))
        if self.alpha <= 0:
            raise InvalidInput(f"eta factor needs alpha > 0, got {self.alpha}")

    def to_json(self) -> dict:
        return {"alpha": fraction_str(self.alpha), "beta": fraction_str(self.beta), "exponent": self.exponent}


def eta_expansion(alpha, beta, truncation) -> PuiseuxSeries:
    """e(beta/24) q^(alpha/24) prod_{n>=1} (1 - e(n beta) q^(n alpha)) up to q^truncation."""
    alpha, beta, truncation = Fraction(alpha), Fraction(beta), Fraction(truncation)
    if alpha <= 0:
        raise InvalidInput(f"alpha must be positive, got {alpha}")
    lead = alpha / 24
    if truncation < lead:
        raise InvalidInput(f"truncation {truncation} is below the leading exponent {lead}")
    m = alpha.denominator
    k = _frac_mod1(beta).denominator
    step = int(alpha * m)
    rows = int((truncation - lead) * m) + 1
    body = np.zeros((rows, k), dtype=np.int64)
    body[0, 0] = 1
    bnum = int(_frac_mod1(beta) * k)
    n = 1
    while n * step < rows:
        s = n * step
        e = (n * bnum) % k
        # multiply by (1 - zeta^e X^s), top rows first
        body[s:] -= np.roll(body[:rows - s], e, axis=1)
        n += 1
    return PuiseuxSeries(m, k, beta / 24, lead, body)


def eta_product(factors: Sequence[EtaFactor], truncation) -> PuiseuxSeries:
    """Product of eta factors, exact through ``truncation``."""
    truncation = Fraction(truncation)
    leads = [abs(f.exponent) * f.alpha / 24 for f in factors]
    # each factor needs slack for the others' valuations and for inversion
    margin = 2 * sum(leads) + 1
    out = None
    for f in factors:
        s = eta_expansion(f.alpha, f.beta, truncation + margin) ** f.exponent
        out = s if out is None else out * s
    if out is None:
        return one_series(truncation)
    if out.truncation < truncation:
        raise AssertionError("insufficient working precision")
    return out.truncate(truncation)


def psi_factors(form: DiscriminantForm, label: CuspLabel) -> tuple[EtaFactor, EtaFactor]:
    """The eta factors in z1 and z2 of the Borcherds product of the type of ``label``."""
    N, Np = form.N, form.Nprime
    P = cusp_parameters(form, label)
    ud2 = (P.u * P.d2) % Np
    f1 = EtaFactor(Fraction(N * P.d1 * P.d1, Np * Np * P.M), Fraction(ud2 * P.d1, Np))
    f2 = EtaFactor(Fraction(N, Np * P.M), 0)
    return (f1, f2) if label.star == 1 else (f2, f1)


def psi_expansion(form: DiscriminantForm, label: CuspLabel, truncation) -> tuple[PuiseuxSeries, PuiseuxSeries]:
    f1, f2 = psi_factors(form, label)
    return (eta_expansion(f1.alpha, f1.beta, truncation), eta_expansion(f2.alpha, f2.beta, truncation))


# --- identities ----------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityResult:
    holds: bool
    constant: CyclotomicNumber | None

    def constant_exponent(self) -> Fraction | None:
        return None if self.constant is None else self.constant.root_of_unity_exponent()


def compare_up_to_constant(A: PuiseuxSeries, B: PuiseuxSeries, upto=None) -> IdentityResult:
    """Is A = c B termwise for a constant c?  c is measured from the leading terms."""
    if A.lead != B.lead:
        return IdentityResult(False, None)
    cA, cB = A.leading_coefficient(), B.leading_coefficient()
    c = cA / cB
    x = c.root_of_unity_exponent()
    if x is None:
        # general constants: compare coefficient by coefficient
        t = min(A.truncation, B.truncation) if upto is None else min(A.truncation, B.truncation, Fraction(upto))
        ta, tb = A.terms(), B.terms()
        for e in sorted(set(ta) | set(tb)):
            if e > t:
                break
            if ta.get(e, 0) != c * tb.get(e, CyclotomicNumber.rational(0)):
                return IdentityResult(False, c)
        return IdentityResult(True, c)
    return IdentityResult(A.equals(B.scale_root(x), upto), c)


def eta_identity_sides(p: int, r: int, truncation) -> tuple[PuiseuxSeries, PuiseuxSeries]:
    n = p ** r
    phi = n - n // p
    units = [u for u in range(1, n + 1) if u % p]
    lhs = eta_product([EtaFactor(Fraction(1, n), Fraction(u, n)) for u in units], truncation)
    rhs = eta_product([EtaFactor(1, 0, phi + 2), EtaFactor(Fraction(1, n), 0, -1), EtaFactor(n, 0, -1)], truncation)
    return lhs, rhs


def eta_identity_check(p: int, r: int, terms: int = 50) -> IdentityResult:
    """prod_u eta((z+u)/p^r) against eta(z)^(phi+2) / (eta(z/p^r) eta(p^r z)).

    ``terms`` counts consecutive exponent slots q^(lead + i/p^r) compared.
    """
    n = p ** r
    if n > 16:
        raise GuardExceeded(f"eta identity guard is p^r <= 16, got {n}")
    phi = n - n // p
    lead = Fraction(phi, 24 * n)
    lhs, rhs = eta_identity_sides(p, r, lead + Fraction(terms - 1, n))
    return compare_up_to_constant(lhs, rhs)


def psi_product(form: DiscriminantForm, weights: dict[FqmSubgroup, int], variable: int, truncation):
    """prod over types H of (z_variable factor of Psi_H) ** weights[H]."""
    witness = dict(enumerate_types(form))
    factors = []
    for H, w in weights.items():
        if w:
            f = psi_factors(form, witness[H])[variable - 1]
            factors.append(EtaFactor(f.alpha, f.beta, w))
    return eta_product(factors, truncation)


def relation_lift_check(p: int, r: int, rprime: int, terms: int = 30) -> bool:
    """The relation among characteristic functions lifts to an identity of eta
    quotients: positive and negative parts agree up to a constant in each variable."""
    from .invariants import types_span
    from .linalg import primitive_integer_vector

    if p ** r > 9:
        raise GuardExceeded(f"relation lift guard is p^r <= 9, got {p ** r}")
    if not 1 <= rprime <= r:
        raise InvalidInput("need 1 <= r' <= r")
    form = DiscriminantForm(p ** r, p ** rprime)
    types = [H for H, _ in enumerate_types(form)]
    _, kernel = types_span(form)
    if len(kernel) != 1:
        return False
    x = primitive_integer_vector(kernel[0])
    pos = {H: c for H, c in zip(types, x) if c > 0}
    neg = {H: -c for H, c in zip(types, x) if c < 0}
    for variable in (1, 2):
        m = _grid(form, types, variable)
        lead = _lead(form, pos, variable)
        t = lead + Fraction(terms - 1, m)
        res = compare_up_to_constant(psi_product(form, pos, variable, t), psi_product(form, neg, variable, t))
        if not res.holds:
            return False
    return True


def _grid(form, types, variable) -> int:
    witness = dict(enumerate_types(form))
    m = 1
    for H in types:
        f = psi_factors(form, witness[H])[variable - 1]
        m = lcm(m, f.alpha.denominator)
    return m


def _lead(form, weights, variable) -> Fraction:
    witness = dict(enumerate_types(form))
    return sum((w * psi_factors(form, witness[H])[variable - 1].alpha / 24 for H, w in weights.items()),
               Fraction(0))


# --- orders at cusps ---------------------------------------------------------------------

def _content(x: Fraction, y: Fraction) -> Fraction:
    """Positive t with (x, y) = t (x0, y0), x0, y0 coprime integers."""
    den = lcm(x.denominator, y.denominator)
    g = gcd(int(x * den), int(y * den))
    return Fraction(g, den)


def order_at_cusp(factors: Sequence[EtaFactor], a: int, c: int) -> Fraction:
    """Vanishing order of prod eta(alpha z + beta)^e at a/c in the parameter e(w), z = gamma w.

    With gamma = [[a, b], [c, d]] and X = [[alpha, beta], [0, 1]] gamma, X = gamma' Y with
    gamma' in SL2(Z) and Y = [[t, *], [0, alpha/t]], where t is the content of
    X's first column; eta(gamma' tau) differs from eta(tau) by a non-vanishing
    factor, so each factor contributes e * t^2 / (24 alpha).
    """
    if gcd(a, c) != 1:
        raise InvalidInput(f"gcd({a}, {c}) != 1")
    total = Fraction(0)
    for f in factors:
        if not isinstance(f, EtaFactor):
            raise InvalidInput(f"unsupported factor {f!r}")
        col0 = f.alpha * a + f.beta * c
        t = _content(col0, Fraction(c))
        total += f.exponent * t * t / (24 * f.alpha)
    return total


@dataclass(frozen=True)
class CrossValidation:
    ratios: tuple[tuple[CuspLabel, Fraction], ...]

    @property
    def constant(self) -> bool:
        return len({r for _, r in self.ratios}) <= 1

    @property
    def value(self) -> Fraction | None:
        return self.ratios[0][1] if self.ratios and self.constant else None

    def to_json(self) -> dict:
        return {"constant": self.constant,
                "ratio": None if self.value is None else fraction_str(self.value),
                "classes": [{"star": l.star, "a": l.a, "c": l.c, "ratio": fraction_str(r)} for l, r in self.ratios]}


def fricke_image(form: DiscriminantForm, label: CuspLabel) -> tuple[int, int]:
    """Cusp at which the psi factor of ``label`` is expanded.

    The psi factors live on the Fricke side: a/c goes to W (eps a / c) with
    W = ((0, -1), (N/N', 0)) and eps = +1 for star 1, -1 for star 2.
    """
    eps = 1 if label.star == 1 else -1
    x, y = -label.c, (form.N // form.Nprime) * eps * label.a
    g = gcd(x, y)
    x, y = x // g, y // g
    if y < 0 or (y == 0 and x < 0):
        x, y = -x, -y
    return x, y


def boundary_order(form: DiscriminantForm, H: FqmSubgroup, label: CuspLabel) -> Fraction:
    """Order of Psi_H along the cusp of ``label`` in the local parameter e(w/N_z),
    N_z the level of the isotropic vector attached to the cusp."""
    from .divisors import levels_of_cusp

    witness = dict(enumerate_types(form))
    if H not in witness:
        raise InvalidInput("H is not a type of this form")
    f = psi_factors(form, witness[H])[label.star - 1]
    a, c = fricke_image(form, label)
    return order_at_cusp([f], a, c) * levels_of_cusp(form, label)[0]


def cross_validate_boundary(form: DiscriminantForm, H: FqmSubgroup, truncation=None) -> CrossValidation:
    """Ratio of the eta-quotient order to #(H meet type(S)) on every cusp class S."""
    out = []
    for S in cusp_classes(form):
        lab = S.representative
        out.append((lab, boundary_order(form, H, lab) / intersection_count(H, S.type)))
    return CrossValidation(tuple(out))
