"""Kernel backend selection for truncated-Taylor products.

The single hot loop in the whole library is the fused scatter-multiply
``out[tk[m]] += a[ti[m]] * b[tj[m]]`` driving jet multiplication.  It is
compiled with numba when available; a pure-numpy ``bincount`` path is kept
as a fallback and for debugging.  Selection order:

1. ``FINSLER_LAB_BACKEND`` environment variable (``numba`` or ``numpy``),
2. ``numba`` if importable, else ``numpy``.

``set_backend``/``get_backend`` allow switching at runtime (used by the
benchmark script).
"""

from __future__ import annotations

import os

import numpy as np

_VALID = ("numba", "numpy")


def _mul_numpy(a, b, ti, tj, tk, n):
    return np.bincount(tk, weights=a[ti] * b[tj], minlength=n)


_mul_numba = None


def _load_numba():
    global _mul_numba
    if _mul_numba is not None:
        return _mul_numba
    from numba import njit

    @njit(cache=True)
    def _kernel(a, b, ti, tj, tk, out):
        for m in range(ti.size):
            out[tk[m]] += a[ti[m]] * b[tj[m]]

    def _mul(a, b, ti, tj, tk, n):
        out = np.zeros(n)
        _kernel(a, b, ti, tj, tk, out)
        return out

    _mul_numba = _mul
    return _mul


def _initial_backend() -> str:
    name = os.environ.get("FINSLER_LAB_BACKEND", "").strip().lower()
    if name in _VALID:
        return name
    try:
        import numba  # noqa: F401

        return "numba"
    except ImportError:
        return "numpy"


_backend = _initial_backend()


def set_backend(name: str) -> None:
    if name not in _VALID:
        raise ValueError(f"unknown backend {name!r}, expected one of {_VALID}")
    if name == "numba":
        _load_numba()
    global _backend
    _backend = name


def get_backend() -> str:
    return _backend


def available_backends() -> tuple[str, ...]:
    try:
        import numba  # noqa: F401

        return ("numpy", "numba")
    except ImportError:
        return ("numpy",)


def mul(a, b, ti, tj, tk, n):
    """Fused scatter product of coefficient vectors a, b through the index table."""
    if _backend == "numba":
        return _load_numba()(a, b, ti, tj, tk, n)
    return _mul_numpy(a, b, ti, tj, tk, n)
