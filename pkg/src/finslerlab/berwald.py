"""Berwald curvature: oracles by exact third direction-derivatives of the
geodesic coefficients, the closed form available for closed conformal beta,
and the isotropic-curvature fit B = tau * pattern(F).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .beta import conformal_fit_at, riemannian_spray
from .errors import NonConformalError, SingularMetricError
from .geometry import MetricInstance, check_domain, compute_b2, phi_jet, squared_norm_series
from .jets import generic_solve, jetspace
from .spray import eh_scalars, spray_general_generic


@dataclass(frozen=True)
class BerwaldTensor:
    """b[i, j, k, l] = third derivative of G^i by y^j, y^k, y^l."""

    b: np.ndarray

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.b)))


@dataclass(frozen=True)
class FJets:
    """Direction-derivatives of the norm F at one (x, y)."""

    Fy: np.ndarray  # [j]
    Fyy: np.ndarray  # [j, k]
    Fyyy: np.ndarray  # [j, k, l]


@dataclass(frozen=True)
class IsotropicFit:
    tau: float
    residual_max: float
    pattern_scale: float
    is_isotropic: bool
    is_berwald: bool


def _tensor_from_sprays(G, n) -> BerwaldTensor:
    out = np.empty((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(j, n):
                for l in range(k, n):
                    orders: dict[int, int] = {}
                    for v in (j, k, l):
                        orders[v] = orders.get(v, 0) + 1
                    v = G[i].deriv(orders)
                    # symmetric in (j, k, l)
                    out[i, j, k, l] = out[i, j, l, k] = out[i, k, j, l] = v
                    out[i, k, l, j] = out[i, l, j, k] = out[i, l, k, j] = v
    return BerwaldTensor(b=out)


def berwald_oracle(inst: MetricInstance, x, y, via: str = "definitional") -> BerwaldTensor:
    """B_j{}^i{}_{kl} by exact differentiation of the spray, no closed form.

    ``via='definitional'`` differentiates the defining formula for G^i;
    ``via='general'`` differentiates the general algebraic formula.  The two
    paths share no curvature-specific code.
    """
    n = inst.dim
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if via == "general":
        space = jetspace(((n, 3),))
        Y = space.variables(y)
        G = spray_general_generic(inst, x, Y)
        return _tensor_from_sprays(G, n)
    if via != "definitional":
        raise ValueError(f"unknown oracle path {via!r}")
    big, F2 = squared_norm_series(inst, x, y, y_order=5, x_order=1)
    sub = jetspace(((n, 3),))
    xvars = list(range(n, 2 * n))
    g = [[None] * n for _ in range(n)]
    rhs = [None] * n
    Ysub = sub.variables(y)
    for l in range(n):
        dl = F2.partial(l)
        for i in range(l, n):
            g[i][l] = g[l][i] = 0.5 * dl.partial(i).restricted(sub)
        acc = -1.0 * F2.partial(n + l).restricted(sub)
        for k in range(n):
            acc = acc + dl.partial(n + k).restricted(sub) * Ysub[k]
        rhs[l] = acc
    try:
        G = generic_solve(g, rhs)
    except ZeroDivisionError as err:
        raise SingularMetricError(f"fundamental tensor singular at x={x}, y={y}") from err
    G = [0.25 * gi for gi in G]
    return _tensor_from_sprays(G, n)


def berwald_closed_form(inst: MetricInstance, x, y, c: float | None = None) -> BerwaldTensor:
    """The curvature formula for closed conformal beta, in terms of E, H and
    their s-derivatives.  Requires b_{i|j} = c * a_ij; pass ``c`` to skip the
    pointwise fit."""
    if c is None:
        fit = conformal_fit_at(inst, x)
        if not fit.is_conformal_closed:
            raise NonConformalError(
                f"beta is not closed conformal at x={x} (residual {fit.residual:.3e})"
            )
        c = fit.c
    n = inst.dim
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = inst.alpha.matrix(x)
    bv = inst.beta.values(x)
    b2 = compute_b2(inst, x)
    al = float(np.sqrt(y @ a @ y))
    s = float(bv @ y) / al
    check_domain(inst, b2, s, point=x)
    eh = eh_scalars(inst.phi, b2, s)
    E0, E2, E22, E222 = eh.E, eh.E2, eh.E22, eh.E222
    H2, H22, H222 = eh.H2, eh.H22, eh.H222
    yl = a @ y
    bup = np.linalg.solve(a, bv)
    out = np.empty((n, n, n, n))

    def blk1(i, j, k, l):
        return ((E0 - s * E2) * a[k, l] + E22 * bv[l] * bv[k]) * (i == j) + (
            (s / al) * (3.0 * E22 + s * E222) * yl[l] * yl[j]
            - (E22 + s * E222) * bv[l] * yl[j]
        ) * bv[k] * y[i] / al**2

    def blk2(i, j, k, l):
        return s * E22 * ((yl[k] * bv[l] + yl[l] * bv[k]) * (i == j) + a[j, l] * bv[k] * y[i]) + (
            E0 - s * E2 - s * s * E22
        ) * (yl[l] * (i == j) + a[l, j] * y[i]) * yl[k] / al

    def blk4(j, k, l):
        return (
            (H2 - s * H22) * (bv[j] - (s / al) * yl[j]) * a[k, l]
            - (H2 - s * H22 - s * s * H222) * bv[l] * yl[j] * yl[k] / al**2
            - (s * H222 / al) * bv[k] * bv[l] * yl[j]
        )

    for i in range(n):
        for j in range(n):
            for k in range(j, n):
                for l in range(k, n):
                    cyc = ((j, k, l), (k, l, j), (l, j, k))
                    v = (c / al) * sum(blk1(i, p, q, r) for p, q, r in cyc)
                    v -= (c / al**2) * sum(blk2(i, p, q, r) for p, q, r in cyc)
                    v += (c / al**2) * (
                        (3.0 * E0 - 3.0 * s * E2 - 6.0 * s * s * E22 - s**3 * E222)
                        * yl[k] * yl[j] * yl[l] / al**3
                        + E222 * bv[l] * bv[k] * bv[j]
                    ) * y[i]
                    v += (c / al) * sum(blk4(p, q, r) for p, q, r in cyc) * bup[i]
                    v += (c / al) * (
                        (s / al**3) * (3.0 * H2 - 3.0 * s * H22 - s * s * H222)
                        * yl[j] * yl[k] * yl[l]
                        + H222 * bv[l] * bv[k] * bv[j]
                    ) * bup[i]
                    out[i, j, k, l] = out[i, j, l, k] = out[i, k, j, l] = v
                    out[i, k, l, j] = out[i, l, j, k] = out[i, l, k, j] = v
    return BerwaldTensor(b=out)


def f_jets_closed(inst: MetricInstance, x, y) -> FJets:
    """First, second and third direction-derivatives of F in closed form."""
    n = inst.dim
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = inst.alpha.matrix(x)
    bv = inst.beta.values(x)
    b2 = compute_b2(inst, x)
    al = float(np.sqrt(y @ a @ y))
    s = float(bv @ y) / al
    check_domain(inst, b2, s, point=x)
    pj = phi_jet(inst.phi, b2, s)
    p, p2, p22, p222 = pj.p(0, 0), pj.p(0, 1), pj.p(0, 2), pj.p(0, 3)
    yl = a @ y
    Fy = (yl / al) * p + p2 * (al * bv - s * yl) / al
    Fyy = np.empty((n, n))
    Fyyy = np.empty((n, n, n))
    for j in range(n):
        for k in range(j, n):
            Fyy[j, k] = Fyy[k, j] = (
                (p - s * p2) * a[j, k] / al
                - s * p22 / al**2 * (bv[k] * yl[j] + bv[j] * yl[k])
                + p22 / al * bv[j] * bv[k]
                - (p - s * p2 - s * s * p22) / al**3 * yl[j] * yl[k]
            )

    def term(j, k, l):
        return (
            (s * p2 + s * s * p22 - p) / al * a[k, l] * yl[j]
            + s / al**2 * (3.0 * p22 + s * p222) * bv[k] * yl[l] * yl[j]
            - s * p22 * a[j, l] * bv[k]
            - (p22 + s * p222) / al * bv[l] * bv[j] * yl[k]
        )

    for j in range(n):
        for k in range(j, n):
            for l in range(k, n):
                v = sum(term(p_, q, r) for p_, q, r in ((j, k, l), (k, l, j), (l, j, k))) / al**2
                v += (3.0 * p - 3.0 * s * p2 - 6.0 * s * s * p22 - s**3 * p222) / al**5 * (
                    yl[j] * yl[k] * yl[l]
                )
                v += p222 / al**2 * bv[l] * bv[k] * bv[j]
                Fyyy[j, k, l] = Fyyy[j, l, k] = Fyyy[k, j, l] = v
                Fyyy[k, l, j] = Fyyy[l, j, k] = Fyyy[l, k, j] = v
    return FJets(Fy=Fy, Fyy=Fyy, Fyyy=Fyyy)


def isotropic_pattern(inst: MetricInstance, x, y) -> np.ndarray:
    """The tensor multiplying tau in the isotropic condition:
    F_{jk} d^i_l + F_{jl} d^i_k + F_{kl} d^i_j + F_{jkl} y^i."""
    n = inst.dim
    y = np.asarray(y, dtype=float)
    fj = f_jets_closed(inst, x, y)
    out = np.empty((n, n, n, n))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                for l in range(n):
                    out[i, j, k, l] = (
                        fj.Fyy[j, k] * (i == l)
                        + fj.Fyy[j, l] * (i == k)
                        + fj.Fyy[k, l] * (i == j)
                        + fj.Fyyy[j, k, l] * y[i]
                    )
    return out


def isotropic_fit(inst: MetricInstance, samples, tol: float = 1e-7,
                  via: str = "definitional") -> IsotropicFit:
    """Least-squares tau over ``samples`` = [(x, y), ...] such that the
    Berwald tensor is tau times the isotropic pattern; the residual is the
    max deviation from that fit."""
    num = 0.0
    den = 0.0
    pairs = []
    for x, y in samples:
        B = berwald_oracle(inst, x, y, via=via).b
        P = isotropic_pattern(inst, x, y)
        num += float(np.sum(B * P))
        den += float(np.sum(P * P))
        pairs.append((B, P))
    if den == 0.0:
        raise SingularMetricError("isotropic pattern vanished on every sample")
    tau = num / den
    residual = max(float(np.max(np.abs(B - tau * P))) for B, P in pairs)
    scale = max(float(np.max(np.abs(P))) for _, P in pairs)
    bmax = max(float(np.max(np.abs(B))) for B, _ in pairs)
    return IsotropicFit(
        tau=tau,
        residual_max=residual,
        pattern_scale=scale,
        is_isotropic=residual < tol * max(1.0, scale),
        is_berwald=bmax < tol,
    )
