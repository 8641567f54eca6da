"""Exact linear algebra over Q (and over any exact field via duck typing).

Integer matrices go through fraction-free Bareiss elimination; general field
entries use plain Gauss-Jordan.  ``rank_mod_p`` is a fast lower bound for the
rank of an integer matrix and is only ever used as one side of a certificate.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np


def _is_zero(x) -> bool:
    return x == 0


def bareiss_echelon(M: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """Fraction-free row echelon form of an integer matrix.

    Returns the non-zero echelon rows and their pivot columns.
    """
    A = [list(map(int, r)) for r in M]
    if not A:
        return [], []
    nrows, ncols = len(A), len(A[0])
    pivots: list[int] = []
    prev = 1
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        pr = A[r]
        for i in range(r + 1, nrows):
            ai = A[i]
            f = ai[c]
            A[i] = [0] * (c + 1) + [(piv * ai[j] - f * pr[j]) // prev for j in range(c + 1, ncols)]
        prev = piv
        pivots.append(c)
        r += 1
    return A[:r], pivots


def rank(M) -> int:
    """Exact rank; integer matrices use Bareiss, others Gauss-Jordan."""
    if not len(M):
        return 0
    if all(isinstance(v, (int, np.integer)) for row in M for v in row):
        return len(bareiss_echelon(M)[1])
    return len(rref(M)[1])


def rref(M) -> tuple[list[list], list[int]]:
    """Reduced row echelon form over the field of the entries (ints become Fractions)."""
    A = [[Fraction(v) if isinstance(v, (int, np.integer)) else v for v in row] for row in M]
    if not A:
        return [], []
    nrows, ncols = len(A), len(A[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = next((i for i in range(r, nrows) if not _is_zero(A[i][c])), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [v * inv for v in A[r]]
        for i in range(nrows):
            if i != r and not _is_zero(A[i][c]):
                f = A[i][c]
                A[i] = [a - f * b for a, b in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return A[:r], pivots


def nullspace(M, ncols: int | None = None) -> list[list[Fraction]]:
    """Basis of {v : M v = 0}; one vector per free column, free entry 1."""
    if ncols is None:
        ncols = len(M[0])
    if not len(M):
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    if all(isinstance(v, (int, np.integer)) for row in M for v in row):
        rows, pivots = bareiss_echelon(M)
        R, pivots = rref(rows)
    else:
        R, pivots = rref(M)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * ncols
        v[fc] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[fc]
        basis.append(v)
    return basis


def solve(M, b) -> list[Fraction] | None:
    """One solution of M x = b, free variables set to zero; None if inconsistent.

    Pivot columns are the lexicographically first independent columns.
    """
    ncols = len(M[0]) if len(M) else 0
    aug = [list(row) + [bv] for row, bv in zip(M, b)]
    R, pivots = rref(aug)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for row, pc in zip(R, pivots):
        x[pc] = row[ncols]
    return x


def primitive_integer_vector(v: Sequence[Fraction]) -> list[int]:
    """Scale a rational vector to coprime integers, first non-zero entry positive."""
    from math import gcd, lcm

    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return ints
    ints = [x // g for x in ints]
    lead = next(x for x in ints if x)
    return [-x for x in ints] if lead < 0 else ints


def rank_mod_p(M: np.ndarray, p: int) -> int:
    """Rank of an integer matrix over F_p (p < 2**31)."""
    A = np.array(M, dtype=np.int64) % p
    nrows, ncols = A.shape
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = (A[r] * inv) % p
        col = A[:, c].copy()
        col[r] = 0
        rows = np.nonzero(col)[0]
        if rows.size:
            A[rows] = (A[rows] - np.outer(col[rows], A[r])) % p
        r += 1
    return r
