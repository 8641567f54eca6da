"""Group algebra of L'/L, the Weil representation and its invariants.

Vectors carry exact coefficients (Fractions or CyclotomicNumbers) keyed by
FqmElement.  Vectors on a quotient H^perp/H are keyed by the least element
(in code order) of each coset.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache

import numpy as np

from .cusps import enumerate_types, make_label, type_of_cusp
from .cyclotomic import CyclotomicNumber, GroupRingMatrix, prime_with_root_of_unity, reduce_group_ring
from .errors import GuardExceeded, InvalidInput, InvariantViolation
from .fqm import (
    DiscriminantForm,
    FqmElement,
    FqmSubgroup,
    enumerate_self_dual_isotropic,
    fraction_str,
    intersection_count,
    max_form_order,
    orthogonal_complement,
)
from .linalg import nullspace, primitive_integer_vector, rank, rank_mod_p

WEIL_MATRIX_MAX_ORDER = 576


@dataclass(frozen=True, eq=False)
class IsotropicQuotient:
    """H^perp/H for an isotropic subgroup H."""

    H: FqmSubgroup

    def __post_init__(self):
        if not self.H.is_isotropic():
            raise InvalidInput("descent/induction need an isotropic subgroup")

    @property
    def form(self) -> DiscriminantForm:
        return self.H.form

    @cached_property
    def perp(self) -> FqmSubgroup:
        return orthogonal_complement(self.H)

    @cached_property
    def _rep_of_code(self) -> dict[int, int]:
        form = self.form
        hs = [form.decode(c) for c in self.H.codes]
        out: dict[int, int] = {}
        for code in self.perp.codes:
            if code in out:
                continue
            g = form.decode(code)
            coset = [form.encode(form.add(g, h)) for h in hs]
            rep = min(coset)
            for c in coset:
                out[c] = rep
        return out

    @property
    def order(self) -> int:
        return self.perp.order // self.H.order

    def representatives(self) -> list[FqmElement]:
        return [self.form.decode(c) for c in sorted(set(self._rep_of_code.values()))]

    def rep(self, g) -> FqmElement:
        code = self.form.encode(g)
        if code not in self._rep_of_code:
            raise InvalidInput(f"{tuple(g)} is not in H^perp")
        return self.form.decode(self._rep_of_code[code])

    def zero(self) -> FqmElement:
        return FqmElement(0, 0, 0, 0)


class GroupAlgebraVector:
    """Finite sum of coefficient * e_gamma over a form or an isotropic quotient."""

    __slots__ = ("space", "coeffs")

    def __init__(self, space, coeffs=None):
        self.space = space
        self.coeffs: dict[FqmElement, object] = {}
        form = space if isinstance(space, DiscriminantForm) else space.form
        for g, c in (coeffs or {}).items():
            g = form.element(*g)
            if isinstance(space, IsotropicQuotient):
                g = space.rep(g)
            if c != 0:
                total = self.coeffs.get(g, 0) + c
                if total == 0:
                    self.coeffs.pop(g, None)
                else:
                    self.coeffs[g] = total

    @property
    def form(self) -> DiscriminantForm:
        s = self.space
        return s if isinstance(s, DiscriminantForm) else s.form

    def __getitem__(self, g):
        return self.coeffs.get(self.form.element(*g), 0)

    def __add__(self, other: "GroupAlgebraVector") -> "GroupAlgebraVector":
        out = dict(self.coeffs)
        for g, c in other.coeffs.items():
            out[g] = out.get(g, 0) + c
        return GroupAlgebraVector(self.space, out)

    def __neg__(self):
        return GroupAlgebraVector(self.space, {g: -c for g, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "GroupAlgebraVector":
        return GroupAlgebraVector(self.space, {g: s * c for g, c in self.coeffs.items()})

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, GroupAlgebraVector):
            return NotImplemented
        return self.form == other.form and not (self - other).coeffs

    def __hash__(self):
        raise TypeError("GroupAlgebraVector is unhashable")

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return all(isinstance(c, (int, Fraction)) for c in self.coeffs.values())

    def to_json(self) -> dict:
        out = {}
        for g in sorted(self.coeffs):
            c = self.coeffs[g]
            out[f"[{g.w},{g.x},{g.y},{g.z}]"] = fraction_str(c) if isinstance(c, (int, Fraction)) else c.to_json()
        return out

    def __repr__(self):
        return f"GroupAlgebraVector({self.to_json()})"


def vector_from_json(form: DiscriminantForm, doc: dict) -> GroupAlgebraVector:
    coeffs = {}
    for key, val in doc.items():
        g = tuple(int(t) for t in key.strip("[]").split(","))
        if len(g) != 4:
            raise InvalidInput(f"bad element key {key!r}")
        coeffs[g] = Fraction(val)
    return GroupAlgebraVector(form, coeffs)


def basis_vector(space, g) -> GroupAlgebraVector:
    return GroupAlgebraVector(space, {tuple(g): Fraction(1)})


def char_vector(H: FqmSubgroup) -> GroupAlgebraVector:
    return GroupAlgebraVector(H.form, {g: Fraction(1) for g in H.elements()})


def inner_product(v: GroupAlgebraVector, w: GroupAlgebraVector):
    """Standard bilinear pairing sum_gamma v_gamma w_gamma (no conjugation)."""
    total = 0
    small, big = (v, w) if len(v.coeffs) <= len(w.coeffs) else (w, v)
    for g, c in small.coeffs.items():
        d = big.coeffs.get(g)
        if d is not None:
            total = total + c * d
    return total


def descent(H: FqmSubgroup, v: GroupAlgebraVector) -> GroupAlgebraVector:
    """e_gamma -> e_{gamma+H} for gamma in H^perp, and 0 otherwise."""
    Q = IsotropicQuotient(H)
    perp = Q.perp
    return GroupAlgebraVector(Q, {g: c for g, c in v.coeffs.items() if g in perp})


def induction(H: FqmSubgroup, w: GroupAlgebraVector) -> GroupAlgebraVector:
    """e_{gamma+H} -> sum over gamma' in H of e_{gamma+gamma'}."""
    Q = w.space if isinstance(w.space, IsotropicQuotient) else IsotropicQuotient(H)
    if Q.H != H:
        raise InvalidInput("vector lives on a different quotient")
    form = H.form
    hs = H.elements()
    out = {}
    for g, c in w.coeffs.items():
        for h in hs:
            k = form.add(g, h)
            out[k] = out.get(k, 0) + c
    return GroupAlgebraVector(form, out)


# --- Weil representation -----------------------------------------------------------

def _coords(form: DiscriminantForm):
    codes = np.arange(form.order, dtype=np.int64)
    N, Np = form.N, form.Nprime
    z = codes % Np
    y = (codes // Np) % Np
    x = (codes // (Np * Np)) % N
    w = codes // (Np * Np * N)
    return w, x, y, z


def q_exponents(form: DiscriminantForm) -> np.ndarray:
    """N * q(gamma) mod N for every element in code order."""
    w, x, y, z = _coords(form)
    return (w * x + (form.N // form.Nprime) * y * z) % form.N


def bilinear_exponents(form: DiscriminantForm, rows=None, cols=None) -> np.ndarray:
    """N * (gamma, delta) mod N for gamma in ``rows``, delta in ``cols`` (code arrays)."""
    w, x, y, z = _coords(form)
    r = np.arange(form.order) if rows is None else np.asarray(rows)
    c = np.arange(form.order) if cols is None else np.asarray(cols)
    k = form.N // form.Nprime
    return (np.outer(w[r], x[c]) + np.outer(x[r], w[c])
            + k * (np.outer(y[r], z[c]) + np.outer(z[r], y[c]))) % form.N


def gauss_sum(form: DiscriminantForm) -> CyclotomicNumber:
    """sum_gamma e(q(gamma)) as an exact cyclotomic number."""
    counts = np.bincount(q_exponents(form), minlength=form.N)
    return CyclotomicNumber(form.N, [int(c) for c in counts])


def check_signature(form: DiscriminantForm) -> None:
    """Milgram: the Gauss sum equals sqrt(|D|) e(sig/8); here it must be N*N'."""
    if gauss_sum(form) != form.N * form.Nprime:
        raise InvariantViolation(f"Gauss sum of {form} is not N*N'; signature convention broken")


def _weil_guard(form: DiscriminantForm):
    if form.order > WEIL_MATRIX_MAX_ORDER:
        raise GuardExceeded(f"explicit Weil matrices limited to order {WEIL_MATRIX_MAX_ORDER}, got {form.order}")


def weil_T(form: DiscriminantForm) -> GroupRingMatrix:
    _weil_guard(form)
    check_signature(form)
    n = form.order
    exps = np.zeros((n, n), dtype=np.int64)
    np.fill_diagonal(exps, q_exponents(form))
    return GroupRingMatrix.from_exponents(exps, form.N, mask=np.eye(n, dtype=bool))


def weil_S(form: DiscriminantForm) -> GroupRingMatrix:
    """Entry (delta, gamma) = e(-(gamma, delta)) / (N N')."""
    _weil_guard(form)
    check_signature(form)
    return GroupRingMatrix.from_exponents(-bilinear_exponents(form), form.N, den=form.N * form.Nprime)


def negation_permutation(form: DiscriminantForm) -> GroupRingMatrix:
    perm = [form.encode([-t for t in form.decode(c)]) for c in range(form.order)]
    return GroupRingMatrix.permutation(perm, form.N)


def is_invariant(v: GroupAlgebraVector) -> bool:
    if not isinstance(v.space, DiscriminantForm):
        raise InvalidInput("invariance is only defined on the full discriminant form")
    form = v.form
    if not v.coeffs:
        return True
    if any(form.q(g) != 0 for g in v.coeffs):
        return False
    codes = [form.encode(g) for g in v.coeffs]
    vals = list(v.coeffs.values())
    if v.is_rational():
        den = 1
        for c in vals:
            den = den * Fraction(c).denominator // np.gcd(den, Fraction(c).denominator)
        ints = [int(Fraction(c) * den) for c in vals]
        return _rational_S_fixed(form, codes, ints)
    return _cyclotomic_S_fixed(form, codes, vals)


def _rational_S_fixed(form, codes, ints) -> bool:
    """Check S v = v for v = sum ints[i] e_{codes[i]} (scaled to integers)."""
    n, m = form.order, form.N
    E = (-bilinear_exponents(form, cols=codes)) % m
    acc = np.zeros((n, m), dtype=object)
    for j, val in enumerate(ints):
        acc[np.arange(n), E[:, j]] += val
    red = reduce_group_ring(acc, m)
    target = np.zeros_like(red)
    scale = form.N * form.Nprime
    for c, val in zip(codes, ints):
        target[c, 0] = val * scale
    return bool(np.all(red == target))


def _cyclotomic_S_fixed(form, codes, vals) -> bool:
    m = form.N
    E = (-bilinear_exponents(form, cols=codes)) % m
    scale = form.N * form.Nprime
    lookup = dict(zip(codes, vals))
    for d in range(form.order):
        total = CyclotomicNumber.rational(0, m)
        for j, val in enumerate(vals):
            total = total + CyclotomicNumber.root_of_unity(Fraction(int(E[d, j]), m), m) * val
        if total != lookup.get(d, 0) * scale:
            return False
    return True


@dataclass(frozen=True)
class InvariantDimension:
    dim: int
    lower: int
    upper: int
    method: str
    prime: int


def invariant_space_dim(form: DiscriminantForm, max_order: int | None = None) -> int:
    return invariant_space_certificate(form, max_order).dim


@lru_cache(maxsize=64)
def _invariant_certificate(form: DiscriminantForm) -> InvariantDimension:
    check_signature(form)
    m = form.N
    iso = np.nonzero(q_exponents(form) == 0)[0]
    # upper bound: v must live on isotropic elements (T) and satisfy S v = v;
    # the rank of the system over F_p (zeta -> omega) never exceeds its rank over Q(zeta)
    p, omega = prime_with_root_of_unity(max(m, 2))
    powers = np.array([pow(omega, (-k) % m, p) for k in range(m)], dtype=np.int64)
    E = bilinear_exponents(form, cols=iso)
    A = powers[E]
    scale = (form.N * form.Nprime) % p
    A[iso, np.arange(len(iso))] = (A[iso, np.arange(len(iso))] - scale) % p
    upper = len(iso) - rank_mod_p(A, p)
    # lower bound: characteristic functions of self-dual isotropic subgroups are invariant
    sdi = enumerate_self_dual_isotropic(form)
    G = [[intersection_count(a, b) for b in sdi] for a in sdi]
    lower = rank(G)
    if lower == upper:
        return InvariantDimension(lower, lower, upper, "certified", p)
    exact = len(iso) - _exact_cyclotomic_rank(form, iso)
    if not lower <= exact <= upper:
        raise InvariantViolation(f"inconsistent invariant bounds {lower} <= {exact} <= {upper}")
    return InvariantDimension(exact, lower, upper, "exact", p)


def invariant_space_certificate(form: DiscriminantForm, max_order: int | None = None) -> InvariantDimension:
    """Dimension of the Weil invariants, squeezed between an exact lower bound
    (rank of self-dual isotropic characteristic functions) and an upper bound
    (rank of the linear system over F_p).  Falls back to cyclotomic elimination."""
    limit = max_form_order() if max_order is None else max_order
    if form.order > limit:
        raise GuardExceeded(f"form of order {form.order} exceeds the invariant guard {limit}")
    return _invariant_certificate(form)


def _exact_cyclotomic_rank(form: DiscriminantForm, iso) -> int:
    from .linalg import rref

    m = form.N
    E = (-bilinear_exponents(form, cols=iso)) % m
    scale = form.N * form.Nprime
    rows = []
    zeta = [CyclotomicNumber.root_of_unity(Fraction(k, m), m) for k in range(m)]
    for d in range(form.order):
        row = [zeta[int(E[d, j])] for j in range(len(iso))]
        for j, c in enumerate(iso):
            if c == d:
                row[j] = row[j] - scale
        rows.append(row)
    return len(rref(rows)[1])


# --- span of types ------------------------------------------------------------------

def type_gram_matrix(form: DiscriminantForm) -> list[list[int]]:
    types = [H for H, _ in enumerate_types(form)]
    return [[intersection_count(a, b) for b in types] for a in types]


@lru_cache(maxsize=256)
def _types_span(form: DiscriminantForm):
    G = type_gram_matrix(form)
    # Gram matrix of real vectors: same rank and kernel as the vectors themselves
    kernel = [tuple(Fraction(x) for x in primitive_integer_vector(v)) for v in nullspace(G)]
    return len(G) - len(kernel), tuple(kernel)


def types_span(form: DiscriminantForm) -> tuple[int, list[list[Fraction]]]:
    dim, kernel = _types_span(form)
    return dim, [list(v) for v in kernel]


def types_span_formula(N: int, Nprime: int) -> int:
    from .fqm import prime_factors

    total = 1
    fp = prime_factors(Nprime)
    for p, r in prime_factors(N).items():
        rp = fp.get(p, 0)
        if rp:
            total *= 2 * ((r - rp + 1) * p ** rp - (r - rp - 1) * p ** (rp - 1)) - 1
        else:
            total *= r + 1
    return total


def combination_vector(form: DiscriminantForm, coeffs: dict[FqmSubgroup, Fraction]) -> GroupAlgebraVector:
    out = GroupAlgebraVector(form)
    for H, c in coeffs.items():
        if c:
            out = out + char_vector(H).scale(Fraction(c))
    return out


def relation_coefficients(p: int, r: int, rprime: int, reading: str = "non_overlapping") -> dict[FqmSubgroup, Fraction]:
    """Left side minus right side of the prime-power type relation, keyed by type.

    ``literal`` lets c run over p^(r-r') Z / p^r Z in the middle sum; ``non_overlapping``
    uses c p^(r-r'+1) with c mod p^(r'-1) as in the type list.
    """
    if rprime < 1 or rprime > r:
        raise InvalidInput("need 1 <= r' <= r")
    if reading not in ("literal", "non_overlapping"):
        raise InvalidInput(f"unknown reading {reading!r}")
    form = DiscriminantForm(p ** r, p ** rprime)
    out: dict[FqmSubgroup, Fraction] = {}
    for star, sign in ((1, 1), (2, -1)):
        labels = [make_label(star, p * a, 1) for a in range(p ** (rprime - 1))]
        if reading == "literal":
            labels += [make_label(star, 1, c * p ** (r - rprime)) for c in range(p ** rprime)]
        else:
            labels += [make_label(star, 1, c * p ** (r - rprime + 1)) for c in range(p ** (rprime - 1))]
        for u in range(1, p ** rprime + 1):
            if u % p:
                labels += [make_label(star, 1, u * p ** s) for s in range(r - rprime + 1)]
        for lab in labels:
            H = type_of_cusp(form, lab)
            out[H] = out.get(H, Fraction(0)) + sign
    return out


def relation_in_kernel(p: int, r: int, rprime: int, reading: str = "non_overlapping") -> bool:
    """Whether the prime-power relation (under ``reading``) is a non-trivial element
    of the relation kernel of the type matrix."""
    form = DiscriminantForm(p ** r, p ** rprime)
    coeffs = relation_coefficients(p, r, rprime, reading)
    types = [H for H, _ in enumerate_types(form)]
    x = [coeffs.get(H, Fraction(0)) for H in types]
    if not any(x):
        return False
    G = type_gram_matrix(form)
    return all(sum(g * xi for g, xi in zip(row, x)) == 0 for row in G)
