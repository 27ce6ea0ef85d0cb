"""Levi-Civita data of alpha and the invariants of the one-form beta.

Conventions: b_{i|j} = d_j b_i - b_k Gamma^k_{ij}; its symmetric and
antisymmetric parts are r_ij and s_ij.  A closed conformal one-form satisfies
b_{i|j} = c(x) a_ij with scalar c(x), detected pointwise by a trace fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularMetricError
from .geometry import MetricField, MetricInstance


@dataclass(frozen=True)
class Christoffel:
    gamma: np.ndarray  # [i, j, k] = Gamma^i_{jk}, symmetric in (j, k)


@dataclass(frozen=True)
class BetaInvariants:
    b_cov: np.ndarray  # b_{i|j}
    r: np.ndarray  # r_ij
    s: np.ndarray  # s_ij
    r00: float
    r0: float
    s0: float
    si0: np.ndarray  # s^i_0
    ri_up: np.ndarray  # r^i
    si_up: np.ndarray  # s^i
    r_scalar: float  # b^i r_i


@dataclass(frozen=True)
class ConformalFit:
    c: float
    residual: float
    is_conformal_closed: bool
    trivial: bool  # b_cov vanishes: Berwald for any profile


def christoffel(alpha: MetricField, x) -> Christoffel:
    a = alpha.matrix(x)
    da = alpha.dmatrix(x)  # [i, j, k] = d_k a_ij
    n = a.shape[0]
    try:
        ainv = np.linalg.inv(a)
    except np.linalg.LinAlgError as err:
        raise SingularMetricError(f"a(x) singular at x={x}") from err
    # Gamma^i_{jk} = 1/2 a^{il} (d_j a_lk + d_k a_lj - d_l a_jk)
    lower = np.empty((n, n, n))
    for l in range(n):
        for j in range(n):
            for k in range(n):
                lower[l, j, k] = 0.5 * (da[l, k, j] + da[l, j, k] - da[j, k, l])
    gamma = np.einsum("il,ljk->ijk", ainv, lower)
    return Christoffel(gamma=gamma)


def riemannian_spray(alpha: MetricField, x, y):
    """Geodesic coefficients of alpha alone: 1/2 Gamma^i_{jk} y^j y^k.

    Works for jet-valued y (entries of y may be jets)."""
    gamma = christoffel(alpha, x).gamma
    n = gamma.shape[0]
    out = []
    for i in range(n):
        acc = 0.0
        for j in range(n):
            for k in range(n):
                g = gamma[i, j, k]
                if g != 0.0:
                    acc = acc + 0.5 * g * y[j] * y[k]
        out.append(acc)
    return out


def covariant_derivative_beta(inst: MetricInstance, x) -> np.ndarray:
    gamma = christoffel(inst.alpha, x).gamma
    db = inst.beta.dvalues(x)  # [i, j] = d_j b_i
    b = inst.beta.values(x)
    return db - np.einsum("k,kij->ij", b, gamma)


def beta_invariants(inst: MetricInstance, x, y) -> BetaInvariants:
    y = np.asarray(y, dtype=float)
    a = inst.alpha.matrix(x)
    ainv = np.linalg.inv(a)
    b = inst.beta.values(x)
    b_up = ainv @ b
    b_cov = covariant_derivative_beta(inst, x)
    r = 0.5 * (b_cov + b_cov.T)
    s = 0.5 * (b_cov - b_cov.T)
    r_i = r.T @ b_up  # r_i = b^j r_{ji}
    s_i = s.T @ b_up
    return BetaInvariants(
        b_cov=b_cov,
        r=r,
        s=s,
        r00=float(y @ r @ y),
        r0=float(r_i @ y),
        s0=float(s_i @ y),
        si0=ainv @ s @ y,
        ri_up=ainv @ r_i,
        si_up=ainv @ s_i,
        r_scalar=float(b_up @ r_i),
    )


def conformal_fit_at(inst: MetricInstance, x, tol: float = 1e-8) -> ConformalFit:
    a = inst.alpha.matrix(x)
    b_cov = covariant_derivative_beta(inst, x)
    n = a.shape[0]
    scale = max(1.0, float(np.max(np.abs(a))))
    if float(np.max(np.abs(b_cov))) < tol * scale:
        return ConformalFit(c=0.0, residual=float(np.max(np.abs(b_cov))),
                            is_conformal_closed=True, trivial=True)
    c = float(np.trace(np.linalg.solve(a, b_cov))) / n
    residual = float(np.max(np.abs(b_cov - c * a)))
    return ConformalFit(c=c, residual=residual, is_conformal_closed=residual < tol, trivial=False)


def conformal_check(inst: MetricInstance, sample_points, tol: float = 1e-8):
    """Per-point closed-conformal fits; c(x) is re-fit at every point."""
    return [conformal_fit_at(inst, x, tol) for x in sample_points]
