"""Geodesic (spray) coefficients, three ways.

* ``spray_definitional`` - the defining formula in terms of derivatives of
  F^2, evaluated through exact jets; this is the oracle.
* ``spray_general`` - the algebraic formula in terms of the profile scalars
  Q, R, Theta, Psi, Pi, Omega and the one-form invariants; valid for any
  beta.
* ``spray_conformal`` - the reduced form G = aG + c*alpha*E*y + c*alpha^2*H*b
  available when beta is closed conformal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beta import beta_invariants, conformal_fit_at, riemannian_spray
from .errors import NonConformalError, RegularityError, SingularMetricError
from .geometry import (
    MetricInstance,
    PhiFunction,
    PhiJet,
    check_domain,
    compute_b2,
    phi_partials,
    squared_norm_series,
)
from .jets import Jet, jetspace, sqrt, value_of


@dataclass(frozen=True)
class SprayScalars:
    Q: float
    R: float
    Theta: float
    Psi: float
    Pi: float
    Omega: float


@dataclass(frozen=True)
class EHScalars:
    E: float
    E2: float
    E22: float
    E222: float
    H: float
    H2: float
    H22: float
    H222: float


@dataclass(frozen=True)
class SprayResult:
    G: np.ndarray
    G_alpha: np.ndarray
    y_coefficient: float | None = None  # c*alpha*E   (conformal decomposition)
    b_coefficient: float | None = None  # c*alpha^2*H


def _scalar_terms(p, u, s):
    """Q, R, Theta, Psi, Pi, Omega from a table of phi partials; generic in s."""
    phi, p1, p2 = p[(0, 0)], p[(1, 0)], p[(0, 1)]
    p12, p22 = p[(1, 1)], p[(0, 2)]
    d1 = phi - s * p2
    d2 = d1 + (u - s * s) * p22
    if abs(value_of(d1)) < 1e-14 or abs(value_of(d2)) < 1e-14:
        raise RegularityError(
            f"spray scalar denominator vanished at (b2={value_of(u) if isinstance(u, Jet) else u}, "
            f"s={value_of(s)})"
        )
    Q = p2 / d1
    R = p1 / d1
    Theta = (d1 * p2 - s * phi * p22) / (2.0 * phi * d2)
    Psi = p22 / (2.0 * d2)
    Pi = (d1 * p12 - s * p1 * p22) / (d1 * d2)
    Omega = 2.0 * p1 / phi - (s * phi + (u - s * s) * p2) / phi * Pi
    return Q, R, Theta, Psi, Pi, Omega


def spray_scalars(jet: PhiJet, b2: float, s: float) -> SprayScalars:
    vals = _scalar_terms(jet.partials, b2, s)
    return SprayScalars(*[float(v) for v in vals])


def eh_scalars(phi: PhiFunction, b2: float, s: float) -> EHScalars:
    """E, H and their s-derivatives to order 3, machine-differentiated
    through the closed forms (no hand-derived derivative formulas)."""
    space = jetspace(((1, 1), (1, 5)))
    U = space.variable(0, float(b2))
    S = space.variable(1, float(s))
    val = phi(U, S)
    if not isinstance(val, Jet):
        val = space.constant(float(val))
    p1 = val.partial(0)
    p2 = val.partial(1)
    p12 = p1.partial(1)
    p22 = p2.partial(1)
    d2 = val - S * p2 + (U - S * S) * p22
    if abs(d2.value) < 1e-14:
        raise RegularityError(f"E/H denominator vanished at (b2={b2}, s={s})")
    H = (p22 - 2.0 * (p1 - S * p12)) / (2.0 * d2)
    E = (p2 + 2.0 * S * p1) / (2.0 * val) - H * (S * val + (U - S * S) * p2) / val
    return EHScalars(
        E=E.deriv({}),
        E2=E.deriv({1: 1}),
        E22=E.deriv({1: 2}),
        E222=E.deriv({1: 3}),
        H=H.deriv({}),
        H2=H.deriv({1: 1}),
        H22=H.deriv({1: 2}),
        H222=H.deriv({1: 3}),
    )


def spray_definitional(inst: MetricInstance, x, y) -> SprayResult:
    """G^i = 1/4 g^{il} ([F^2]_{x^k y^l} y^k - [F^2]_{x^l}) via exact jets."""
    n = inst.dim
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    space, F2 = squared_norm_series(inst, x, y, y_order=2, x_order=1)
    g = np.empty((n, n))
    rhs = np.empty(n)
    for l in range(n):
        for i in range(l, n):
            g[i, l] = g[l, i] = 0.5 * F2.deriv({i: 1, l: 1} if i != l else {l: 2})
        acc = -F2.deriv({n + l: 1})
        for k in range(n):
            acc += F2.deriv({n + k: 1, l: 1}) * y[k]
        rhs[l] = acc
    try:
        G = 0.25 * np.linalg.solve(g, rhs)
    except np.linalg.LinAlgError as err:
        raise SingularMetricError(f"fundamental tensor singular at x={x}, y={y}") from err
    G_alpha = np.array([value_of(v) for v in riemannian_spray(inst.alpha, x, y)])
    return SprayResult(G=G, G_alpha=G_alpha)


def spray_general(inst: MetricInstance, x, y) -> SprayResult:
    x = np.asarray(x, dtype=float)
    G = spray_general_generic(inst, x, np.asarray(y, dtype=float))
    G_alpha = np.array([value_of(v) for v in riemannian_spray(inst.alpha, x, y)])
    return SprayResult(G=np.array([value_of(v) for v in G]), G_alpha=G_alpha)


def spray_general_generic(inst: MetricInstance, x, y):
    """The general spray formula; ``y`` entries may be jets (used by the
    curvature oracle to differentiate this path independently)."""
    n = inst.dim
    a = inst.alpha.matrix(x)
    b = inst.beta.values(x)
    inv = beta_invariants(inst, x, np.ones(n))  # y-independent pieces only
    b2 = compute_b2(inst, x)
    alpha2 = None
    for i in range(n):
        for j in range(n):
            t = a[i, j] * y[i] * y[j]
            alpha2 = t if alpha2 is None else alpha2 + t
    alpha = sqrt(alpha2)
    beta_val = None
    for i in range(n):
        t = b[i] * y[i]
        beta_val = t if beta_val is None else beta_val + t
    s = beta_val / alpha
    check_domain(inst, b2, value_of(s), point=x)
    parts = phi_partials(inst.phi, float(b2), s, u_order=1, s_order=2)
    Q, R, Theta, Psi, Pi, Omega = _scalar_terms(parts, b2, s)
    # y-contracted invariants, generic in y
    r00 = None
    for i in range(n):
        for j in range(n):
            t = inv.r[i, j] * y[i] * y[j]
            r00 = t if r00 is None else r00 + t
    r_i = inv.r.T @ (np.linalg.solve(a, b))
    s_i = inv.s.T @ (np.linalg.solve(a, b))
    r0 = sum_product(r_i, y)
    s0 = sum_product(s_i, y)
    ainv = np.linalg.inv(a)
    si0 = [sum_product(ainv[i] @ inv.s, y) for i in range(n)]
    b_up = ainv @ b
    core = Theta * (-2.0 * alpha * Q * s0 + r00 + 2.0 * alpha2 * R * inv.r_scalar) + alpha * Omega * (
        r0 + s0
    )
    core_b = Psi * (-2.0 * alpha * Q * s0 + r00 + 2.0 * alpha2 * R * inv.r_scalar) + alpha * Pi * (
        r0 + s0
    )
    aG = riemannian_spray(inst.alpha, x, y)
    out = []
    for i in range(n):
        term = (
            aG[i]
            + alpha * Q * si0[i]
            + core * y[i] / alpha
            + core_b * b_up[i]
            - alpha2 * R * (inv.ri_up[i] + inv.si_up[i])
        )
        out.append(term)
    return out


def sum_product(coeffs, y):
    acc = None
    for c, v in zip(coeffs, y):
        t = c * v
        acc = t if acc is None else acc + t
    return acc


def spray_conformal(inst: MetricInstance, c: float, x, y) -> SprayResult:
    """Reduced spray for closed conformal beta: aG + c*alpha*E*y + c*alpha^2*H*b."""
    fit = conformal_fit_at(inst, x)
    if not fit.is_conformal_closed:
        raise NonConformalError(
            f"beta is not closed conformal at x={x} (residual {fit.residual:.3e})"
        )
    n = inst.dim
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = inst.alpha.matrix(x)
    b = inst.beta.values(x)
    b2 = compute_b2(inst, x)
    alpha = float(np.sqrt(y @ a @ y))
    s = float(b @ y) / alpha
    check_domain(inst, b2, s, point=x)
    eh = eh_scalars(inst.phi, b2, s)
    b_up = np.linalg.solve(a, b)
    G_alpha = np.array([value_of(v) for v in riemannian_spray(inst.alpha, x, y)])
    ycoef = c * alpha * eh.E
    bcoef = c * alpha * alpha * eh.H
    return SprayResult(
        G=G_alpha + ycoef * y + bcoef * b_up,
        G_alpha=G_alpha,
        y_coefficient=ycoef,
        b_coefficient=bcoef,
    )
