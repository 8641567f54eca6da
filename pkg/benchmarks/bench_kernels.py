"""Compiled kernels against the pure-Python fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Times each kernel on inputs taken from real workloads and prints one line
per kernel with both timings and the speedup.
"""
import argparse
import random
import timeit

from spbdiv import _kernels_py as pure
from spbdiv.cusps import principal_level_labels, _mul, _inv, _sl2_completion
from spbdiv.fqm import DiscriminantForm, enumerate_self_dual_isotropic

try:
    from spbdiv import _kernels as compiled
except ImportError:
    compiled = None


def workloads():
    form = DiscriminantForm(12, 6)
    big = DiscriminantForm(24, 12)
    subs = enumerate_self_dual_isotropic(DiscriminantForm(6, 6))
    codes = [H.codes for H in subs]
    H = subs[-1]
    rng = random.Random(0)
    labels = principal_level_labels(DiscriminantForm(6, 3), 1)
    pairs = []
    for _ in range(400):
        l1, l2 = rng.choice(labels), rng.choice(labels)
        A1, A2 = _sl2_completion(l1.a, l1.c), _sl2_completion(l2.a, l2.c)
        g0 = _mul(A2, _inv(A1))
        h = _mul(g0, _mul(_mul(A1, ((0, 1), (0, 0))), _inv(A1)))
        pairs.append(((g0[0][0], g0[0][1], g0[1][0], g0[1][1]), (h[0][0], h[0][1], h[1][0], h[1][1])))
    return {
        "span_codes": lambda k: [k.span_codes([[1, 2, 1, 0], [0, 3, 0, 1], [4, 0, 2, 3]], [24, 8, 12], big.moduli)
                                 for _ in range(3)],
        "intersection_size": lambda k: [k.intersection_size(a, b) for a in codes for b in codes],
        "parabolic_scan": lambda k: [k.parabolic_scan(g, h, 6, 3) for g, h in pairs],
        "span_codes (type)": lambda k: k.span_codes([list(r) for r in H.hnf], list(H.counts), list(form.moduli)),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernels not built; only the fallback is available")
    print(f"{'kernel':<20} {'python (ms)':>12} {'cython (ms)':>12} {'speedup':>8}")
    for name, fn in workloads().items():
        if compiled is not None:
            # identical results before timing anything
            assert list(fn(pure)) == list(fn(compiled)), name
        tp = min(timeit.repeat(lambda: fn(pure), number=1, repeat=args.repeat)) * 1e3
        if compiled is None:
            print(f"{name:<20} {tp:12.2f} {'-':>12} {'-':>8}")
            continue
        tc = min(timeit.repeat(lambda: fn(compiled), number=1, repeat=args.repeat)) * 1e3
        print(f"{name:<20} {tp:12.2f} {tc:12.2f} {tp / tc:7.1f}x")


if __name__ == "__main__":
    main()
