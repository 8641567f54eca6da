"""Discriminant form of L = U(N) + U(N') and its subgroups.

The group is (Z/N)^2 + (Z/N')^2 with q(w, x, y, z) = wx/N + yz/N'.
Subgroups are stored as the Hermite normal form of their preimage lattice in
Z^4, which always contains the relation lattice diag(N, N, N', N').
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, lru_cache
from typing import Iterable, NamedTuple, Sequence

from .errors import GuardExceeded, InvalidInput
from .kernels import intersection_size, span_codes

DEFAULT_MAX_FORM_ORDER = 36 * 36


def max_form_order() -> int:
    """Guard for exhaustive searches; override with ``MAX_FORM_ORDER``."""
    return int(os.environ.get("MAX_FORM_ORDER", DEFAULT_MAX_FORM_ORDER))


class RationalMod1(Fraction):
    """An element of Q/Z, normalised to [0, 1)."""

    def __new__(cls, numerator=0, denominator=None):
        value = Fraction(numerator, denominator)
        return super().__new__(cls, value - (value.numerator // value.denominator))

    def __repr__(self):
        return f"RationalMod1({self.numerator}/{self.denominator})"

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"


def fraction_str(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def parse_fraction(s) -> Fraction:
    return Fraction(str(s))


class FqmElement(NamedTuple):
    w: int
    x: int
    y: int
    z: int


def prime_factors(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class DiscriminantForm:
    N: int
    Nprime: int

    def __post_init__(self):
        if self.N < 1 or self.Nprime < 1:
            raise InvalidInput(f"N and Nprime must be positive, got {self.N}, {self.Nprime}")
        if self.N % self.Nprime:
            raise InvalidInput(f"Nprime={self.Nprime} does not divide N={self.N}")

    @property
    def order(self) -> int:
        return self.N ** 2 * self.Nprime ** 2

    @property
    def moduli(self) -> tuple[int, int, int, int]:
        return (self.N, self.N, self.Nprime, self.Nprime)

    @property
    def level(self) -> int:
        return self.N

    def element(self, w, x=0, y=0, z=0) -> FqmElement:
        N, Np = self.N, self.Nprime
        return FqmElement(w % N, x % N, y % Np, z % Np)

    def encode(self, g: Sequence[int]) -> int:
        N, Np = self.N, self.Nprime
        return ((g[0] % N * N + g[1] % N) * Np + g[2] % Np) * Np + g[3] % Np

    def decode(self, code: int) -> FqmElement:
        N, Np = self.N, self.Nprime
        code, z = divmod(code, Np)
        code, y = divmod(code, Np)
        w, x = divmod(code, N)
        return FqmElement(w, x, y, z)

    def elements(self) -> Iterable[FqmElement]:
        """All elements, lexicographic in (w, x, y, z)."""
        return (self.decode(c) for c in range(self.order))

    def q(self, g: Sequence[int]) -> RationalMod1:
        return RationalMod1(Fraction(g[0] * g[1], self.N) + Fraction(g[2] * g[3], self.Nprime))

    def bilinear(self, g: Sequence[int], h: Sequence[int]) -> RationalMod1:
        return RationalMod1(Fraction(g[0] * h[1] + g[1] * h[0], self.N)
                            + Fraction(g[2] * h[3] + g[3] * h[2], self.Nprime))

    def add(self, g, h) -> FqmElement:
        return self.element(*(a + b for a, b in zip(g, h)))

    def scale(self, k: int, g) -> FqmElement:
        return self.element(*(k * a for a in g))

    def to_json(self) -> dict:
        return {"N": self.N, "Nprime": self.Nprime}


def element_from_matrix(form: DiscriminantForm, a, b, c, d) -> FqmElement:
    """Image of the dual-lattice matrix ((a, b), (c, d)) in the discriminant group.

    Membership in L' requires N'a, Nb, N'c, N'd to be integers.
    """
    N, Np = form.N, form.Nprime
    vals = [Fraction(Np) * Fraction(a), Fraction(N) * Fraction(b),
            Fraction(Np) * Fraction(c), Fraction(Np) * Fraction(d)]
    for name, v in zip("abcd", vals):
        if v.denominator != 1:
            raise InvalidInput(f"matrix entry {name} has too large a denominator for L'")
    na, nb, nc, nd = (int(v) for v in vals)
    return form.element(nb, nc, na, -nd)


def hermite_normal_form(rows: list[list[int]], ncols: int = 4) -> tuple[tuple[int, ...], ...]:
    """Row HNF of a full-rank integer lattice: upper triangular, positive pivots,
    entries above each pivot reduced into [0, pivot)."""
    rows = [list(r) for r in rows if any(r)]
    out: list[list[int]] = []
    for col in range(ncols):
        rest = [r for r in rows if r[col] != 0]
        rows = [r for r in rows if r[col] == 0]
        while len(rest) > 1:
            rest.sort(key=lambda r: abs(r[col]))
            piv = rest[0]
            nxt = [piv]
            for r in rest[1:]:
                k = r[col] // piv[col]
                r = [a - k * b for a, b in zip(r, piv)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rows.append(r)
            rest = nxt
        if not rest:
            raise InvalidInput("lattice is not of full rank")
        piv = rest[0]
        if piv[col] < 0:
            piv = [-a for a in piv]
        for i, r in enumerate(out):
            k = r[col] // piv[col]
            if k:
                out[i] = [a - k * b for a, b in zip(r, piv)]
        out.append(piv)
    return tuple(tuple(r) for r in out)


@dataclass(frozen=True, eq=False)
class FqmSubgroup:
    form: DiscriminantForm
    hnf: tuple[tuple[int, ...], ...]

    def __eq__(self, other):
        return isinstance(other, FqmSubgroup) and self.form == other.form and self.hnf == other.hnf

    def __hash__(self):
        return hash((self.form, self.hnf))

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    @property
    def sort_key(self):
        return self.hnf

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(m // self.hnf[i][i] for i, m in enumerate(self.form.moduli))

    @property
    def order(self) -> int:
        n = 1
        for k in self.counts:
            n *= k
        return n

    @property
    def canonical_generators(self) -> list[FqmElement]:
        """Non-trivial HNF rows reduced mod the component moduli."""
        gens = []
        for row, k in zip(self.hnf, self.counts):
            if k > 1:
                gens.append(self.form.element(*row))
        return gens

    @cached_property
    def codes(self) -> list[int]:
        return span_codes([list(r) for r in self.hnf], list(self.counts), list(self.form.moduli))

    @cached_property
    def code_set(self) -> frozenset[int]:
        return frozenset(self.codes)

    def elements(self) -> list[FqmElement]:
        return [self.form.decode(c) for c in self.codes]

    def __contains__(self, g) -> bool:
        return self.form.encode(g) in self.code_set

    def is_isotropic(self) -> bool:
        gens = self.canonical_generators
        f = self.form
        return all(f.q(g) == 0 for g in gens) and all(
            f.bilinear(g, h) == 0 for i, g in enumerate(gens) for h in gens[i + 1:])

    def to_json(self) -> dict:
        return {"N": self.form.N, "Nprime": self.form.Nprime,
                "generators": [list(g) for g in self.canonical_generators]}


def subgroup_from_generators(form: DiscriminantForm, gens: Iterable[Sequence[int]]) -> FqmSubgroup:
    rows = [list(g) for g in gens]
    for r in rows:
        if len(r) != 4:
            raise InvalidInput(f"element {r} does not have four components")
    m = form.moduli
    rows += [[m[i] if j == i else 0 for j in range(4)] for i in range(4)]
    return FqmSubgroup(form, hermite_normal_form(rows))


def subgroup_from_json(doc: dict) -> FqmSubgroup:
    form = DiscriminantForm(int(doc["N"]), int(doc["Nprime"]))
    return subgroup_from_generators(form, doc.get("generators", []))


def trivial_subgroup(form: DiscriminantForm) -> FqmSubgroup:
    return subgroup_from_generators(form, [])


def whole_group(form: DiscriminantForm) -> FqmSubgroup:
    return subgroup_from_generators(form, [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


def _same_form(H1: FqmSubgroup, H2: FqmSubgroup):
    if H1.form != H2.form:
        raise InvalidInput(f"subgroups live in different forms {H1.form} and {H2.form}")


def intersection_count(H1: FqmSubgroup, H2: FqmSubgroup) -> int:
    _same_form(H1, H2)
    return intersection_size(H1.codes, H2.codes)


def intersection(H1: FqmSubgroup, H2: FqmSubgroup) -> FqmSubgroup:
    _same_form(H1, H2)
    common = H1.code_set & H2.code_set
    return subgroup_from_generators(H1.form, [H1.form.decode(c) for c in sorted(common)])


def subgroup_sum(H1: FqmSubgroup, H2: FqmSubgroup) -> FqmSubgroup:
    _same_form(H1, H2)
    return subgroup_from_generators(H1.form, list(H1.hnf) + list(H2.hnf))


def orthogonal_complement(H: FqmSubgroup) -> FqmSubgroup:
    """H^perp, computed as the dual of the preimage lattice of H.

    With Gram matrix G of the bilinear form, the preimage of H^perp is
    G^{-1} B^{-1} Z^4 where B holds the HNF rows of H.
    """
    f = H.form
    B = [[Fraction(v) for v in row] for row in H.hnf]
    Binv = _upper_inverse(B)
    N, Np = f.N, f.Nprime
    Ginv = [[0, N, 0, 0], [N, 0, 0, 0], [0, 0, 0, Np], [0, 0, Np, 0]]
    prod = [[sum(Ginv[i][k] * Binv[k][j] for k in range(4)) for j in range(4)] for i in range(4)]
    cols = []
    for j in range(4):
        col = [prod[i][j] for i in range(4)]
        if any(v.denominator != 1 for v in col):
            raise AssertionError("dual lattice not integral")
        cols.append([int(v) for v in col])
    return subgroup_from_generators(f, cols)


def _upper_inverse(B):
    n = len(B)
    inv = [[Fraction(0)] * n for _ in range(n)]
    for j in range(n):
        inv[j][j] = 1 / B[j][j]
        for i in range(j - 1, -1, -1):
            s = sum(B[i][k] * inv[k][j] for k in range(i + 1, j + 1))
            inv[i][j] = -s / B[i][i]
    return inv


def is_self_dual_isotropic(H: FqmSubgroup) -> bool:
    if H.order ** 2 != H.form.order:
        return False
    return H.is_isotropic()


def p_part_multiplier(N: int, p: int) -> int:
    """The idempotent e with e = 1 mod p^a and e = 0 mod N/p^a, where p^a || N."""
    pa = p ** prime_factors(N).get(p, 0)
    m = N // pa
    return (m * pow(m, -1, pa)) % N if pa > 1 else 0


def p_primary_part(H: FqmSubgroup, p: int) -> FqmSubgroup:
    f = H.form
    if f.N % p or p not in prime_factors(f.N):
        raise InvalidInput(f"{p} is not a prime divisor of N={f.N}")
    e = p_part_multiplier(f.N, p)
    return subgroup_from_generators(f, [[e * a for a in row] for row in H.hnf])


def p_component(form: DiscriminantForm, p: int) -> FqmSubgroup:
    return p_primary_part(whole_group(form), p)


def _check_guard(form: DiscriminantForm, max_order: int | None):
    limit = max_form_order() if max_order is None else max_order
    if form.order > limit:
        raise GuardExceeded(f"form of order {form.order} exceeds the exhaustive-search guard {limit}")


def _sdi_in_component(form: DiscriminantForm, comp: FqmSubgroup) -> list[FqmSubgroup]:
    """Self-dual isotropic subgroups of the p-component ``comp``, by DFS over
    isotropic subgroups grown one isotropic element at a time."""
    target = comp.order
    iso = [g for g in comp.elements() if form.q(g) == 0 and any(g)]
    start = trivial_subgroup(form)
    seen = {start}
    stack = [start]
    found = set()
    while stack:
        H = stack.pop()
        if H.order ** 2 == target:
            found.add(H)
            continue
        gens = H.canonical_generators
        for g in iso:
            if g in H:
                continue
            if any(form.bilinear(g, h) != 0 for h in gens):
                continue
            K = subgroup_from_generators(form, gens + [g])
            if K not in seen:
                seen.add(K)
                stack.append(K)
    return sorted(found)


def enumerate_self_dual_isotropic(form: DiscriminantForm, max_order: int | None = None) -> list[FqmSubgroup]:
    """All self-dual isotropic subgroups, sorted by canonical form.

    Built prime by prime: every such subgroup is the sum of self-dual
    isotropic subgroups of the p-components.
    """
    _check_guard(form, max_order)
    return list(_enumerate_sdi(form))


@lru_cache(maxsize=64)
def _enumerate_sdi(form: DiscriminantForm) -> tuple[FqmSubgroup, ...]:
    parts = [[trivial_subgroup(form)]]
    for p in sorted(prime_factors(form.N)):
        parts.append(_sdi_in_component(form, p_component(form, p)))
    combos = [trivial_subgroup(form)]
    for choices in parts:
        combos = [subgroup_sum(H, K) for H in combos for K in choices]
    return tuple(sorted(set(combos)))
