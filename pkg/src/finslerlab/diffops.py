"""Differentiation engines.

Forward-mode truncated-Taylor differentiation is the primary path everywhere;
central finite differences are kept strictly as an independent oracle with
fixed step sizes, so test numbers are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .jets import jetspace


@dataclass(frozen=True)
class FDConfig:
    """Central-difference configuration.  Steps are fixed, not adaptive."""

    h1: float = 1e-5  # orders 1 and 2
    h3: float = 1e-3  # order 3

    def step(self, order: int) -> float:
        return self.h3 if order >= 3 else self.h1


@dataclass
class DerivResult:
    value: float
    used_fd_fallback: bool = False


def deriv_y(f: Callable, x, y, multi_index: Sequence[int]) -> DerivResult:
    """Partial derivative of f(x, y) in the direction variables.

    ``multi_index`` gives the order per y-component (total order <= 3).  The
    value is an exact Taylor coefficient; if ``f`` cannot digest jet inputs,
    the finite-difference oracle is used and the result flagged.
    """
    multi = tuple(int(k) for k in multi_index)
    total = sum(multi)
    if total > 3:
        raise ValueError("y-derivatives supported up to total order 3")
    n = len(y)
    space = jetspace(((n, max(total, 1)),))
    Y = space.variables(y)
    try:
        val = f(np.asarray(x, dtype=float), Y)
        return DerivResult(val.deriv({i: k for i, k in enumerate(multi) if k}))
    except (TypeError, AttributeError):
        g = lambda yy: f(np.asarray(x, dtype=float), yy)
        return DerivResult(fd_deriv(g, y, multi), used_fd_fallback=True)


def deriv_x(f: Callable, x, y, index: int) -> DerivResult:
    """First derivative of f(x, y) in one base-point coordinate."""
    n = len(x)
    space = jetspace(((n, 1),))
    X = space.variables(x)
    try:
        val = f(X, np.asarray(y, dtype=float))
        return DerivResult(val.deriv({index: 1}))
    except (TypeError, AttributeError):
        g = lambda xx: f(xx, np.asarray(y, dtype=float))
        multi = tuple(1 if i == index else 0 for i in range(n))
        return DerivResult(fd_deriv(g, x, multi), used_fd_fallback=True)


def _fd_1d(f, t0, order, h):
    if order == 0:
        return f(t0)
    if order == 1:
        return (f(t0 + h) - f(t0 - h)) / (2 * h)
    if order == 2:
        return (f(t0 + h) - 2 * f(t0) + f(t0 - h)) / (h * h)
    if order == 3:
        return (f(t0 + 2 * h) - 2 * f(t0 + h) + 2 * f(t0 - h) - f(t0 - 2 * h)) / (2 * h**3)
    raise ValueError("finite differences implemented up to order 3")


def fd_deriv(f: Callable, point, multi_index: Sequence[int], cfg: FDConfig | None = None) -> float:
    """Central-difference mixed partial of f at ``point``.

    Nested one-dimensional stencils, O(h^2) accuracy per direction.  Stencil
    points leaving the domain surface as :class:`DomainError` with the
    offending coordinate attached.
    """
    cfg = cfg or FDConfig()
    point = np.asarray(point, dtype=float)
    multi = tuple(int(k) for k in multi_index)
    if np.isscalar(point) or point.ndim == 0:
        point = point.reshape(1)
    active = [i for i, k in enumerate(multi) if k]
    if not active:
        return float(f(point if len(point) > 1 else point[0]))

    def call(p):
        try:
            return float(f(p if len(p) > 1 else p[0]))
        except DomainError as err:
            raise DomainError(
                f"finite-difference stencil left the domain at {p}: {err}", point=p
            ) from err

    def recurse(p, remaining):
        if not remaining:
            return call(p)
        i = remaining[0]
        order = multi[i]
        h = cfg.step(order)

        def along(t):
            q = p.copy()
            q[i] = t
            return recurse(q, remaining[1:])

        return _fd_1d(along, p[i], order, h)

    return recurse(point.copy(), active)
