"""Adaptive Simpson quadrature and AD-transparent antiderivatives."""

from __future__ import annotations

import threading
from typing import Callable

from .errors import QuadratureError
from .jets import Jet, jetspace

_MAX_DEPTH = 60


def _simpson(f, a, fa, b, fb, fm):
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(f, a, fa, b, fb, fm, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(f, a, fa, m, fm, flm)
    right = _simpson(f, m, fm, b, fb, frm)
    err = left + right - whole
    if abs(err) <= 15.0 * tol:
        return left + right + err / 15.0
    if depth >= _MAX_DEPTH:
        raise QuadratureError(
            f"adaptive Simpson failed to converge (|err|={abs(err):.3e})", interval=(a, b)
        )
    half = 0.5 * tol
    return _adaptive(f, a, fa, m, fm, flm, left, half, depth + 1) + _adaptive(
        f, m, fm, b, fb, frm, right, half, depth + 1
    )


def integrate(f: Callable[[float], float], a: float, b: float, tol: float = 1e-10) -> float:
    """Definite integral of f on [a, b] by adaptive Simpson, absolute tolerance ``tol``."""
    if a == b:
        return 0.0
    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(f, a, fa, b, fb, fm)
    return _adaptive(f, a, fa, b, fb, fm, whole, tol, 0)


class Antiderivative:
    """F(u) = integral of ``integrand`` from ``lower`` to u, evaluable on jets.

    The value part comes from quadrature (memoized); higher Taylor
    coefficients come from exact AD of the integrand, so differentiating the
    result carries only the quadrature error of the constant term.
    """

    def __init__(self, integrand: Callable, lower: float, tol: float = 1e-10):
        self.integrand = integrand
        self.lower = float(lower)
        self.tol = tol
        self._cache: dict[float, float] = {}
        self._lock = threading.Lock()

    def value(self, u: float) -> float:
        u = float(u)
        with self._lock:
            hit = self._cache.get(u)
        if hit is not None:
            return hit
        val = integrate(self.integrand, self.lower, u, self.tol)
        with self._lock:
            self._cache[u] = val
        return val

    def __call__(self, u):
        if not isinstance(u, Jet):
            return self.value(u)
        u0 = u.value
        order = u.space.max_total
        # Taylor coefficients of F at u0: F(u0), then g^{(k-1)}(u0)/k!
        if order >= 2:
            g = self.integrand(jetspace(((1, order - 1),)).variable(0, u0))
        else:
            g = self.integrand(u0)
        coeffs = [self.value(u0)]
        if isinstance(g, Jet):
            gc = g.c  # gc[k] = g^{(k)}(u0)/k!
            for k in range(1, order + 1):
                coeffs.append(gc[k - 1] / k if k - 1 < len(gc) else 0.0)
        else:  # constant integrand
            coeffs.append(float(g))
            coeffs.extend(0.0 for _ in range(order - 1))
        return u._compose(coeffs)
