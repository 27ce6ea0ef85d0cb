"""Grid checks of the pointwise inequalities making F = alpha*phi(b^2, s) a
regular, strongly convex metric:

    phi > 0,
    phi - s*phi2 > 0                          (skipped for n = 2),
    phi - s*phi2 + (b^2 - s^2)*phi22 > 0,

over {|s| <= b < b0_probe} (s in (0, b) for singular profiles).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FinslerError
from .geometry import PhiFunction, phi_partials

_INEQ_NAMES = ("phi>0", "phi-s*phi2>0", "phi-s*phi2+(b2-s2)*phi22>0")


@dataclass(frozen=True)
class Violation:
    b2: float
    s: float
    inequality: str
    value: float


@dataclass(frozen=True)
class RegularityReport:
    passed: bool
    violations: list
    b0_estimate: float
    dimension_mode: str  # "n>=3" or "n=2"
    singular: bool
    grid_density: int


def _scan(phi: PhiFunction, b0_probe: float, n: int, density: int):
    """One grid pass over b = b0_probe*k/density, k < density (b < b0 strictly,
    |s| <= b); returns (violations, largest b below the first violation)."""
    violations = []
    clean_b = 0.0
    for k in range(1, density):
        b = b0_probe * k / density
        u = float(b * b)
        if phi.singular:
            ss = np.linspace(b / density, b * (1.0 - 1.0 / density), density)
        else:
            ss = np.linspace(-b, b, density)
        column_ok = True
        for s in ss:
            s = float(s)
            try:
                p = phi_partials(phi, u, s, u_order=0, s_order=2)
            except (FinslerError, ValueError, ZeroDivisionError, FloatingPointError) as err:
                violations.append(Violation(u, s, f"evaluation failed: {err}", math.nan))
                column_ok = False
                continue
            f, f2, f22 = p[(0, 0)], p[(0, 1)], p[(0, 2)]
            checks = [
                (f, 0),
                (f - s * f2, 1),
                (f - s * f2 + (u - s * s) * f22, 2),
            ]
            if n == 2:
                checks.pop(1)  # two dimensions need only the combined inequality
            for val, which in checks:
                if not val > 0.0:
                    violations.append(Violation(u, s, _INEQ_NAMES[which], float(val)))
                    column_ok = False
        if column_ok and not violations:
            clean_b = float(b)
    return violations, clean_b


def check_regularity(phi: PhiFunction, b0_probe: float, n: int,
                     grid_density: int = 64) -> RegularityReport:
    """Grid sufficiency check; a failing pass is re-run at double density to
    confirm violations near boundaries before reporting."""
    if grid_density < 8:
        raise ValueError("grid_density must be at least 8")
    if n < 2:
        raise ValueError("dimension must be at least 2")
    violations, clean_b = _scan(phi, b0_probe, n, grid_density)
    if not violations:
        refined, clean_ref = _scan(phi, b0_probe, n, 2 * grid_density)
        violations = refined
        clean_b = min(clean_b, clean_ref) if refined else clean_ref
    return RegularityReport(
        passed=not violations,
        violations=violations,
        b0_estimate=clean_b if violations else float(b0_probe),
        dimension_mode="n=2" if n == 2 else "n>=3",
        singular=phi.singular,
        grid_density=grid_density,
    )
