# cython: language_level=3
"""Compiled versions of the hot loops in ``_kernels_py``."""

def span_codes(rows, counts, moduli):
    cdef long m0 = moduli[0], m1 = moduli[1], m2 = moduli[2], m3 = moduli[3]
    cdef long R[8][4]
    cdef long cnt[8]
    cdef int nrows = len(rows)
    if nrows > 8:
        raise ValueError("at most 8 generator rows")
    cdef long total = 1
    cdef int i, j
    for i in range(nrows):
        for j in range(4):
            R[i][j] = rows[i][j]
        cnt[i] = counts[i]
        total *= cnt[i]
    out = [0] * total
    cdef long idx, rem, c, w, x, y, z
    for idx in range(total):
        rem = idx
        w = x = y = z = 0
        for i in range(nrows - 1, -1, -1):
            c = rem % cnt[i]
            rem = rem // cnt[i]
            w += c * R[i][0]
            x += c * R[i][1]
            y += c * R[i][2]
            z += c * R[i][3]
        out[idx] = (((w % m0) * m1 + (x % m1)) * m2 + (y % m2)) * m3 + (z % m3)
    out.sort()
    return out


def intersection_size(a, b):
    cdef Py_ssize_t i = 0, j = 0, la = len(a), lb = len(b)
    cdef long n = 0
    cdef long x, y
    while i < la and j < lb:
        x = a[i]
        y = b[j]
        if x == y:
            n += 1
            i += 1
            j += 1
        elif x < y:
            i += 1
        else:
            j += 1
    return n


def parabolic_scan(g, h, long N, long Nprime):
    cdef long ga = g[0], gb = g[1], gc = g[2]
    cdef long ha = h[0], hb = h[1], hc = h[2]
    cdef long n, a
    for n in range(N * Nprime):
        if (gc + n * hc) % N:
            continue
        if (gb + n * hb) % Nprime:
            continue
        a = (ga + n * ha) % Nprime
        if (a * a - 1) % Nprime == 0:
            return True
    return False
