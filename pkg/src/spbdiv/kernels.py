"""Selects the compiled kernels when available, else the pure-Python ones.

Set ``SPBDIV_PURE=1`` to force the fallback.
"""
import os

if os.environ.get("SPBDIV_PURE"):
    from ._kernels_py import intersection_size, parabolic_scan, span_codes
    BACKEND = "python"
else:
    try:
        from ._kernels import intersection_size, parabolic_scan, span_codes
        BACKEND = "cython"
    except ImportError:
        from ._kernels_py import intersection_size, parabolic_scan, span_codes
        BACKEND = "python"

__all__ = ["BACKEND", "intersection_size", "parabolic_scan", "span_codes"]
