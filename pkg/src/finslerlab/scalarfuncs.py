"""Registered closed-form scalar functions.

Classification parameters (the functions of b^2 appearing in the solution
families) and the outer profile function of the quadrature family are not
arbitrary callables: they are serializable specs so instance files stay
self-contained.  Supported specs:

* a plain number - constant;
* ``{"poly": [c0, c1, ...]}`` - polynomial in b^2, ascending coefficients;
* ``{"rational": {"num": [...], "den": [...]}}`` - ratio of two polynomials.

All evaluation is plain arithmetic, so jets pass through untouched.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from .errors import InstanceFormatError


def _horner(coeffs, x):
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class ScalarFunc:
    """A closed-form scalar function of one variable, with its spec attached."""

    spec: Any

    def __call__(self, u):
        return _eval_spec(self.spec, u)


def _eval_spec(spec, u):
    if isinstance(spec, (int, float)):
        return float(spec) + 0.0 * u if not isinstance(u, (int, float)) else float(spec)
    if isinstance(spec, dict):
        if "poly" in spec:
            return _horner(spec["poly"], u)
        if "rational" in spec:
            return _horner(spec["rational"]["num"], u) / _horner(spec["rational"]["den"], u)
    raise InstanceFormatError(f"unrecognized scalar function spec {spec!r}")


def scalar_func(spec) -> ScalarFunc:
    """Validate and wrap a scalar-function spec."""
    _validate(spec)
    return ScalarFunc(spec)


def _validate(spec):
    if isinstance(spec, (int, float)):
        return
    if isinstance(spec, dict):
        if "poly" in spec:
            if not spec["poly"] or not all(isinstance(c, (int, float)) for c in spec["poly"]):
                raise InstanceFormatError("poly spec needs a non-empty list of numbers")
            return
        if "rational" in spec:
            r = spec["rational"]
            if not isinstance(r, dict) or "num" not in r or "den" not in r:
                raise InstanceFormatError("rational spec needs 'num' and 'den' lists")
            return
    raise InstanceFormatError(f"unrecognized scalar function spec {spec!r}")


# Common shorthands used by the built-in families.
CONST_ZERO = scalar_func(0.0)
CONST_ONE = scalar_func(1.0)


def const(v) -> ScalarFunc:
    return scalar_func(float(v))


def inverse_u(scale=1.0) -> ScalarFunc:
    """scale / b^2 as a rational spec."""
    return scalar_func({"rational": {"num": [float(scale)], "den": [0.0, 1.0]}})
