import os
import subprocess
import sys

import pytest
from hypothesis import given, settings, strategies as st

from spbdiv import _kernels_py as pure
from spbdiv import kernels

compiled = pytest.importorskip("spbdiv._kernels")

sorted_codes = st.lists(st.integers(0, 500), unique=True).map(sorted)


@settings(max_examples=100, deadline=None)
@given(sorted_codes, sorted_codes)
def test_intersection_agrees(a, b):
    assert compiled.intersection_size(a, b) == pure.intersection_size(a, b) == len(set(a) & set(b))


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_span_agrees(data):
    N = data.draw(st.sampled_from([2, 4, 6]))
    Np = data.draw(st.sampled_from([d for d in (1, 2, 3) if N % d == 0]))
    moduli = [N, N, Np, Np]
    rows = [[data.draw(st.integers(0, m - 1)) for m in moduli] for _ in range(data.draw(st.integers(0, 3)))]
    counts = [data.draw(st.integers(1, 3)) for _ in rows]
    assert list(compiled.span_codes(rows, counts, moduli)) == list(pure.span_codes(rows, counts, moduli))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(-30, 30), min_size=4, max_size=4), st.lists(st.integers(-30, 30), min_size=4, max_size=4),
       st.sampled_from([(2, 1), (2, 2), (4, 2), (6, 3), (12, 6)]))
def test_parabolic_scan_agrees(g, h, form):
    N, Np = form
    assert bool(compiled.parabolic_scan(g, h, N, Np)) == bool(pure.parabolic_scan(g, h, N, Np))


def test_backend_selection():
    assert kernels.BACKEND in ("cython", "python")
    env = dict(os.environ, SPBDIV_PURE="1")
    out = subprocess.run([sys.executable, "-c", "from spbdiv.kernels import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True).stdout
    assert out.strip() == "python"


def test_pure_backend_end_to_end():
    code = ("from spbdiv.fqm import DiscriminantForm\n"
            "from spbdiv.cusps import cusp_classes, enumerate_types\n"
            "f = DiscriminantForm(4, 2)\n"
            "print(len(enumerate_types(f)), len(cusp_classes(f)))\n")
    env = dict(os.environ, SPBDIV_PURE="1")
    pure_out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout
    fast_out = subprocess.run([sys.executable, "-c", code], capture_output=True, text=True, check=True).stdout
    assert pure_out == fast_out == "8 8\n"


def test_benchmark_script_runs():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    out = subprocess.run([sys.executable, os.path.join(root, "benchmarks", "bench_kernels.py"), "--repeat", "1"],
                         capture_output=True, text=True, check=True).stdout
    assert "intersection_size" in out
