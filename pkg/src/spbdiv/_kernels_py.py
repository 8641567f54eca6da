"""Pure-Python versions of the hot loops.

Same signatures as the compiled ``_kernels`` module; used when the extension
is not built or ``SPBDIV_PURE=1`` is set.
"""
from __future__ import annotations


def span_codes(rows, counts, moduli):
    """Encode every element ``sum c_i * rows[i]`` with ``0 <= c_i < counts[i]``.

    Elements are reduced mod ``moduli`` and encoded lexicographically, so the
    sorted code list is also the sorted element list.
    """
    m0, m1, m2, m3 = moduli
    acc = [(0, 0, 0, 0)]
    for row, k in zip(rows, counts):
        r0, r1, r2, r3 = row
        nxt = []
        for (a0, a1, a2, a3) in acc:
            for c in range(k):
                nxt.append(((a0 + c * r0) % m0, (a1 + c * r1) % m1,
                            (a2 + c * r2) % m2, (a3 + c * r3) % m3))
        acc = nxt
    return sorted(((w * m1 + x) * m2 + y) * m3 + z for (w, x, y, z) in acc)


def intersection_size(a, b):
    """Size of the intersection of two sorted, duplicate-free code lists."""
    i = j = n = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        if a[i] == b[j]:
            n += 1
            i += 1
            j += 1
        elif a[i] < b[j]:
            i += 1
        else:
            j += 1
    return n


def parabolic_scan(g, h, N, Nprime):
    """Is ``g + n*h`` in the projected group for some ``0 <= n < N*Nprime``?

    ``g`` and ``h`` are 2x2 integer matrices flattened as (a, b, c, d).
    Membership: ``N | c``, ``Nprime | b`` and ``a^2 = 1 mod Nprime``; all three
    are invariant under negation, so the sign of ``g`` does not matter.
    """
    ga, gb, gc, _ = g
    ha, hb, hc, _ = h
    for n in range(N * Nprime):
        if (gc + n * hc) % N:
            continue
        if (gb + n * hb) % Nprime:
            continue
        a = ga + n * ha
        if (a * a - 1) % Nprime == 0:
            return True
    return False
