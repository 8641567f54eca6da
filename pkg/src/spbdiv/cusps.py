"""One-dimensional cusps of X(L) for L = U(N) + U(N').

A cusp is labelled (star, a, c): star 1 is the boundary component {a/c} x H,
star 2 is H x {a/c}.  Both coordinates are acted on by the same projected
group {N | c, N' | b, a^2 = 1 mod N'}.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd
from typing import NamedTuple

from .errors import GuardExceeded, InvalidInput
from .fqm import (
    DiscriminantForm,
    FqmSubgroup,
    max_form_order,
    p_primary_part,
    prime_factors,
    subgroup_from_generators,
)
from .kernels import parabolic_scan


class CuspLabel(NamedTuple):
    star: int
    a: int
    c: int

    @property
    def key(self) -> tuple[int, int]:
        return (self.c, self.a)

    def to_json(self) -> dict:
        return {"star": self.star, "a": self.a, "c": self.c}


def make_label(star: int, a: int, c: int) -> CuspLabel:
    if star not in (1, 2):
        raise InvalidInput(f"star must be 1 or 2, got {star}")
    if c < 0:
        a, c = -a, -c
    if gcd(a, c) != 1:
        raise InvalidInput(f"gcd({a}, {c}) != 1")
    if c == 0:
        a = 1
    return CuspLabel(star, a, c)


@dataclass(frozen=True)
class CuspParameters:
    M: int
    d1: int
    d2: int
    u: int


def _units(n: int) -> list[int]:
    return [u for u in range(1, n + 1) if gcd(u, n) == 1]


def cusp_parameters(form: DiscriminantForm, label: CuspLabel) -> CuspParameters:
    N, Np = form.N, form.Nprime
    star, a, c = label
    M = gcd(N // Np, c)
    d1 = gcd(a, Np)
    d2 = gcd(c // M, Np)
    first = N * a // (Np * M)
    base = N * d1 // (Np * M)
    # star 1 carries -c/M in the z slot, star 2 carries +c/M in the y slot;
    # the reference generator has -u*d2 in that slot in both cases
    target = -c // M if star == 1 else c // M
    for u in _units(Np):
        for k in range(N):
            if (k * base - first) % N == 0 and (-k * u * d2 - target) % Np == 0:
                return CuspParameters(M, d1, d2, u)
    raise AssertionError(f"no unit u found for {label} in {form}")


def type_generators(form: DiscriminantForm, label: CuspLabel) -> list[tuple[int, int, int, int]]:
    N, Np = form.N, form.Nprime
    star, a, c = label
    M = gcd(N // Np, c)
    if star == 1:
        return [(N * a // (Np * M), 0, 0, -(c // M)), (0, c, a, 0)]
    return [(N * a // (Np * M), 0, c // M, 0), (0, c, 0, -a)]


def type_of_cusp(form: DiscriminantForm, label: CuspLabel) -> FqmSubgroup:
    """Image of I^*_{a,c} meet L' in L'/L; depends on (a, c) only mod N."""
    return _type_cached(form, label.star, label.a % form.N, label.c % form.N)


@lru_cache(maxsize=200_000)
def _type_cached(form: DiscriminantForm, star: int, a0: int, c0: int) -> FqmSubgroup:
    return subgroup_from_generators(form, type_generators(form, lift_residues(star, a0, c0, form.N)))


def lift_residues(star: int, a0: int, c0: int, modulus: int) -> CuspLabel:
    """A label (a, c) with a = a0, c = c0 mod ``modulus``; requires gcd(a0, c0, modulus) = 1.

    c = 0 classes go to infinity when a0 = +-1, otherwise c = modulus.
    """
    a0 %= modulus
    c0 %= modulus
    if gcd(gcd(a0, c0), modulus) != 1:
        raise InvalidInput(f"gcd({a0}, {c0}, {modulus}) != 1")
    if c0 == 0:
        if modulus <= 2 or a0 in (1, modulus - 1):
            return CuspLabel(star, 1, 0)
        return CuspLabel(star, a0, modulus)
    a = a0
    while gcd(a, c0) != 1:
        a += modulus
    return CuspLabel(star, a, c0)


def enumerate_types(form: DiscriminantForm) -> list[tuple[FqmSubgroup, CuspLabel]]:
    """Distinct types with their first witness label (star 1 first, then by (c, a) residue)."""
    return list(_enumerate_types(form))


@lru_cache(maxsize=256)
def _enumerate_types(form: DiscriminantForm):
    N = form.N
    seen: dict[FqmSubgroup, CuspLabel] = {}
    for star in (1, 2):
        for c0 in range(N):
            for a0 in range(N):
                if gcd(gcd(a0, c0), N) != 1:
                    continue
                H = _type_cached(form, star, a0, c0)
                if H not in seen:
                    seen[H] = lift_residues(star, a0, c0, N)
    return tuple(seen.items())


def types_count_formula(N: int, Nprime: int) -> int:
    if N < 1 or Nprime < 1 or N % Nprime:
        raise InvalidInput(f"Nprime={Nprime} must divide N={N}")
    total = 1
    fp = prime_factors(Nprime)
    for p, r in prime_factors(N).items():
        rp = fp.get(p, 0)
        if rp:
            total *= 2 * ((r - rp + 1) * p ** rp - (r - rp - 1) * p ** (rp - 1))
        else:
            total *= r + 1
    return total


def prime_power_type_labels(p: int, r: int, rprime: int) -> list[CuspLabel]:
    """The explicit list of type representatives for N = p^r, N' = p^r' (r' >= 1)."""
    out = []
    for star in (1, 2):
        for a in range(p ** (rprime - 1)):
            out.append(make_label(star, p * a, 1))
        for c in range(p ** (rprime - 1)):
            out.append(make_label(star, 1, c * p ** (r - rprime + 1)))
        for u in range(1, p ** rprime + 1):
            if u % p:
                for s in range(r - rprime + 1):
                    out.append(make_label(star, 1, u * p ** s))
    return out


# --- the projected group -----------------------------------------------------------

def projected_group_member(form: DiscriminantForm, star: int, matrix) -> bool:
    """Is ``matrix`` the star-component of an element of the discriminant kernel?

    The four congruences force the partner to have a2 = d1, d2 = a1 mod N, which
    is consistent exactly when a1^2 = 1 mod N'.
    """
    (a, b), (c, d) = matrix
    if a * d - b * c != 1:
        raise InvalidInput(f"matrix {matrix} does not have determinant 1")
    if star not in (1, 2):
        raise InvalidInput(f"star must be 1 or 2, got {star}")
    N, Np = form.N, form.Nprime
    return c % N == 0 and b % Np == 0 and (a * a - 1) % Np == 0


def partner_exists_bruteforce(form: DiscriminantForm, matrix) -> bool:
    """Search partner residues a2, d2 mod N*N' directly (the determinant condition
    a2*d2 - N*N'*b2*c2 = 1 is then solved by b2*c2 = (a2*d2 - 1)/(N*N'))."""
    (a1, b), (c, d1) = matrix
    N, Np = form.N, form.Nprime
    if c % N or b % Np:
        return False
    K = N * Np
    for a2 in range(K):
        if (a1 * a2 - 1) % N or (a2 * d1 - 1) % Np:
            continue
        for d2 in range(K):
            if (a2 * d2 - 1) % K:
                continue
            if (d1 * d2 - 1) % N == 0 and (a1 * d2 - 1) % Np == 0:
                return True
    return False


def _sl2_completion(a: int, c: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """An SL2(Z) matrix with first column (a, c)."""
    g, x, y = _egcd(a, c)
    assert g == 1
    # a*x + c*y = 1  ->  [[a, -y], [c, x]]
    return ((a, -y), (c, x))


def _egcd(a: int, b: int):
    if b == 0:
        return (a, 1, 0) if a >= 0 else (-a, -1, 0)
    g, x, y = _egcd(b, a % b)
    return g, y, x - (a // b) * y


def _mul(A, B):
    return ((A[0][0] * B[0][0] + A[0][1] * B[1][0], A[0][0] * B[0][1] + A[0][1] * B[1][1]),
            (A[1][0] * B[0][0] + A[1][1] * B[1][0], A[1][0] * B[0][1] + A[1][1] * B[1][1]))


def _inv(A):
    return ((A[1][1], -A[0][1]), (-A[1][0], A[0][0]))


def cusps_equivalent(form: DiscriminantForm, star: int, l1: CuspLabel, l2: CuspLabel) -> bool:
    """Decide l1 ~ l2 under the projected group.

    With A_i in SL2(Z) sending infinity to l_i, every g with g(l1) = l2 is
    +-g0 P^n, g0 = A2 A1^{-1}, P = A1 T A1^{-1}.  Entries are linear in n, so
    scanning n over one period N*N' decides membership.
    """
    if l1.star != l2.star:
        raise InvalidInput("labels belong to different stars")
    A1 = _sl2_completion(l1.a, l1.c)
    A2 = _sl2_completion(l2.a, l2.c)
    g0 = _mul(A2, _inv(A1))
    U = _mul(_mul(A1, ((0, 1), (0, 0))), _inv(A1))
    h = _mul(g0, U)
    return bool(parabolic_scan((g0[0][0], g0[0][1], g0[1][0], g0[1][1]),
                               (h[0][0], h[0][1], h[1][0], h[1][1]), form.N, form.Nprime))


def cusp_width(form: DiscriminantForm, a: int, c: int) -> int:
    """Smallest h > 0 with A T^h A^{-1} in the projected group (up to sign), A(inf) = a/c."""
    A = _sl2_completion(a, c)
    U = _mul(_mul(A, ((0, 1), (0, 0))), _inv(A))
    N, Np = form.N, form.Nprime
    for h in range(1, N * Np + 1):
        m = ((1 + h * U[0][0], h * U[0][1]), (h * U[1][0], 1 + h * U[1][1]))
        if projected_group_member(form, 1, m):
            return h
    raise AssertionError("no width found within one period")


@dataclass(frozen=True)
class CuspClass:
    star: int
    representative: CuspLabel
    members: tuple[CuspLabel, ...]
    type: FqmSubgroup

    def to_json(self) -> dict:
        return {"star": self.star, "a": self.representative.a, "c": self.representative.c,
                "members": [[m.a, m.c] for m in self.members],
                "type": [list(g) for g in self.type.canonical_generators]}


def principal_level_labels(form: DiscriminantForm, star: int) -> list[CuspLabel]:
    """One label per cusp of Gamma(N*N'), i.e. per +-class in P^1(Z/(N*N'))."""
    K = form.N * form.Nprime
    seen = set()
    out = []
    for c0 in range(K):
        for a0 in range(K):
            if gcd(gcd(a0, c0), K) != 1:
                continue
            key = min((a0, c0), ((-a0) % K, (-c0) % K))
            if key in seen:
                continue
            seen.add(key)
            out.append(lift_residues(star, a0, c0, K))
    return out


def cusp_classes(form: DiscriminantForm, max_order: int | None = None) -> list[CuspClass]:
    limit = max_form_order() if max_order is None else max_order
    if form.order > limit:
        raise GuardExceeded(f"form of order {form.order} exceeds the cusp-class guard {limit}")
    return list(_cusp_classes(form))


@lru_cache(maxsize=64)
def _cusp_classes(form: DiscriminantForm) -> tuple[CuspClass, ...]:
    out = []
    for star in (1, 2):
        groups: dict[FqmSubgroup, list[list[CuspLabel]]] = {}
        for lab in principal_level_labels(form, star):
            T = type_of_cusp(form, lab)
            buckets = groups.setdefault(T, [])
            for members in buckets:
                if cusps_equivalent(form, star, members[0], lab):
                    members.append(lab)
                    break
            else:
                buckets.append([lab])
        for T, buckets in groups.items():
            for members in buckets:
                members = tuple(sorted(members, key=lambda l: l.key))
                out.append(CuspClass(star, members[0], members, T))
    out.sort(key=lambda cl: (cl.star, cl.representative.key))
    return tuple(out)


def type_factorization_check(N: int, Nprime: int) -> bool:
    """Types(L) -> prod_p Types(L)_p is a bijection, and each factor has the size
    of Types(L_{p^r, p^r'})."""
    form = DiscriminantForm(N, Nprime)
    types = [H for H, _ in enumerate_types(form)]
    primes = sorted(prime_factors(N))
    images = {tuple(p_primary_part(H, p) for p in primes) for H in types}
    if len(images) != len(types):
        return False
    per_prime = []
    for i, p in enumerate(primes):
        factor = {img[i] for img in images}
        local = DiscriminantForm(p ** prime_factors(N)[p], p ** prime_factors(Nprime).get(p, 0))
        if len(factor) != len(enumerate_types(local)):
            return False
        per_prime.append(len(factor))
    prod = 1
    for k in per_prime:
        prod *= k
    return prod == len(types)
