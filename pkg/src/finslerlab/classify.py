"""Classification layer: the residual checks characterizing profiles whose
metrics have isotropic curvature (for closed conformal beta), the four
closed-form solution families, the first-order transport equation of the
singular branch, and its characteristic ODE with both first integrals.

Residual keys used throughout (also the CLI ``residual:<key>`` names):

* ``lemma-E`` / ``lemma-H`` - the two scalar conditions equivalent to
  isotropic curvature: E - s*E2 - rho*(phi - s*phi2) = 0 and
  H2 - s*H22 = 0 (rho = 0 gives the unconditional-flatness case).
* ``pde-main``   - the full first-order PDE in (b^2, s) for phi.
* ``pde-mixed``  - the second-order companion equation.
* ``pde-ds``     - s-derivative of pde-main minus pde-mixed (first order).
* ``pde-reduced``- 2*(pde-main) - s*(pde-ds): no phi_1 term, integrable.
* ``pde-exact``  - exactness form of pde-reduced: the s-derivative of
  (2 - 2*t1*(b^2-s^2) + sigma*s^2)/phi^2 + 8*rho*s/phi vanishes.
* ``transport``  - the reduced transport equation of the singular branch.
* ``recovery-E`` / ``recovery-H`` - deviation of E - rho*phi from linearity
  in s and of H from the even quadratic (t1 + t2*s^2)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, InstanceFormatError
from .geometry import PhiFunction, phi_partials
from .jets import Jet, exp, jetspace, sqrt, value_of
from .quadrature import Antiderivative
from .scalarfuncs import CONST_ZERO, ScalarFunc, scalar_func
from .spray import eh_scalars


@dataclass(frozen=True)
class ClassificationParams:
    """The scalar data (eq9/eq10 coefficients) attached to a profile."""

    rho: float = 0.0
    sigma: ScalarFunc = CONST_ZERO
    t1: ScalarFunc = CONST_ZERO
    t2: ScalarFunc = CONST_ZERO
    b0_ref: float = 1.0


@dataclass(frozen=True)
class PDEResiduals:
    residuals: dict

    def __getitem__(self, key: str) -> float:
        return self.residuals[key]

    def max(self) -> float:
        return max(self.residuals.values())


@dataclass(frozen=True)
class RecoveredParams:
    """Per-grid-point estimates of sigma, t1, t2 with fit deviations."""

    sigma: float
    t1: float
    t2: float
    sigma_deviation: float  # max |E - rho*phi - sigma*s/2|
    h_deviation: float  # max |H - (t1 + t2*s^2)/2|


class OdeSolution:
    """Closed form of the characteristic ODE d(1/s^2)/du = (u*t2 - 1/u)/s^2 - t2,
    u = b^2, as 1/s^2 = (c1 - Q(u))/P(u) with quadrature-backed P, Q."""

    def __init__(self, t2: ScalarFunc, c1: float, b0_ref: float = 1.0, tol: float = 1e-10):
        self.t2 = t2
        self.c1 = float(c1)
        self.b0_ref = float(b0_ref)
        self.tol = tol
        self._logP, self._Q, self._logR = family_quadratures(t2, b0_ref, tol)

    def P(self, u):
        return exp(self._logP(u))

    def Q(self, u):
        return self._Q(u)

    def inverse_s2(self, u):
        """1/s^2 along the characteristic through (b0_ref, 1/c1)."""
        v = (self.c1 - self._Q(u)) / exp(self._logP(u))
        if not isinstance(u, Jet) and v <= 0.0:
            raise DomainError(f"1/s^2 = {v:.6g} non-positive at b2={u}", b2=u)
        return v

    def s2(self, u):
        return 1.0 / self.inverse_s2(u)

    def ode_residual(self, u: float) -> float:
        """|d/du (1/s^2) - (u*t2 - 1/u)*(1/s^2) + t2| by exact differentiation."""
        U = jetspace(((1, 1),)).variable(0, float(u))
        w = self.inverse_s2(U)
        return abs(w.deriv({0: 1}) - (u * self.t2(u) - 1.0 / u) * w.value + self.t2(u))

    def first_integral_ratio(self, u: float) -> float:
        """s^2 / (P + s^2 Q): constant (= 1/c1) along the characteristic."""
        s2 = self.s2(u)
        return s2 / (exp(self._logP(u)) + s2 * self._Q(u))

    def first_integral_log(self, u: float, phi: PhiFunction) -> float:
        """ln(s/phi) - integral of (1/u - u*t2/2): constant along the
        characteristic for any profile solving the transport equation.
        That integral is exactly -log R, so this is ln(s/phi) + log R."""
        s = math.sqrt(self.s2(u))
        return math.log(s / value_of(phi(u, s))) + self._logR(u)


def family_quadratures(t2: ScalarFunc, b0_ref: float, tol: float = 1e-10):
    """The three quadratures shared by the singular solution family and its
    characteristic ODE: log P = int(1/u - u*t2), Q = int(t2 * P),
    log R = int(u*t2/2 - 1/u), all from b0_ref."""
    logP = Antiderivative(lambda v: 1.0 / v - v * t2(v), b0_ref, tol)
    Q = Antiderivative(lambda v: t2(v) * exp(logP(v)), b0_ref, tol)
    logR = Antiderivative(lambda v: 0.5 * v * t2(v) - 1.0 / v, b0_ref, tol)
    return logP, Q, logR


# ---------------------------------------------------------------------------
# solution families
# ---------------------------------------------------------------------------


def _params_scalar(params: dict, key: str, default=None) -> ScalarFunc:
    if key in params:
        return scalar_func(params[key])
    if default is None:
        raise InstanceFormatError(f"missing parameter {key!r}", field=f"phi.params.{key}")
    return scalar_func(default)


def family_randers(params: dict) -> PhiFunction:
    """phi = (4*rho*s + sqrt(2k(1 - t1*b^2) + (16*rho^2 + 2k*t1 + k*sigma)*s^2))/k."""
    rho = float(params.get("rho", 0.0))
    k = _params_scalar(params, "k")
    t1 = _params_scalar(params, "t1", 0.0)
    sigma = _params_scalar(params, "sigma", 0.0)

    def fn(u, s):
        kv = k(u)
        if abs(value_of(kv)) < 1e-14:
            raise DomainError(f"k(b^2) vanished at b2={value_of(u)}", b2=value_of(u))
        t1v = t1(u)
        rad = 2.0 * kv * (1.0 - t1v * u) + (16.0 * rho * rho + 2.0 * kv * t1v + kv * sigma(u)) * (
            s * s
        )
        if value_of(rad) <= 0.0:
            raise DomainError(
                f"radicand {value_of(rad):.6g} not positive at (b2={value_of(u)}, s={value_of(s)})",
                b2=value_of(u),
                s=value_of(s),
            )
        return (4.0 * rho * s + sqrt(rad)) / kv

    return PhiFunction("thm-randers", dict(params), fn)


def family_kropina(params: dict) -> PhiFunction:
    """phi = s / a(b^2): the degenerate branch, positive only for s > 0."""
    a = _params_scalar(params, "a", 1.0)

    def fn(u, s):
        av = a(u)
        if value_of(av) <= 0.0:
            raise DomainError(f"a(b^2) = {value_of(av):.6g} not positive", b2=value_of(u))
        return s / av

    return PhiFunction("thm-kropina", dict(params), fn, singular=True)


def family_riemannian(params: dict) -> PhiFunction:
    """phi = t3(b^2) * sqrt(2(1 - b^2*t1) + (sigma + 2*t1)*s^2): F^2 quadratic."""
    t3 = _params_scalar(params, "t3", 1.0)
    t1 = _params_scalar(params, "t1", 0.0)
    sigma = _params_scalar(params, "sigma", 0.0)

    def fn(u, s):
        t3v = t3(u)
        if value_of(t3v) <= 0.0:
            raise DomainError(f"t3(b^2) = {value_of(t3v):.6g} not positive", b2=value_of(u))
        t1v = t1(u)
        rad = 2.0 * (1.0 - u * t1v) + (sigma(u) + 2.0 * t1v) * s * s
        if value_of(rad) <= 0.0:
            raise DomainError(
                f"radicand {value_of(rad):.6g} not positive at (b2={value_of(u)}, s={value_of(s)})",
                b2=value_of(u),
                s=value_of(s),
            )
        return t3v * sqrt(rad)

    return PhiFunction("thm-riemannian", dict(params), fn)


def family_berwald(params: dict) -> PhiFunction:
    """phi = varphi(s^2/(P + s^2*Q)) * R * s with quadratures P, Q, R built
    from t2; solves the transport equation for any outer profile varphi > 0."""
    t2 = _params_scalar(params, "t2", 0.0)
    varphi = _params_scalar(params, "varphi", {"poly": [1.0, 1.0]})
    b0_ref = float(params.get("b0_ref", 1.0))
    logP, Q, logR = family_quadratures(t2, b0_ref)

    def fn(u, s):
        P = exp(logP(u))
        xi = (s * s) / (P + s * s * Q(u))
        out = varphi(xi) * exp(logR(u)) * s
        if value_of(out) <= 0.0:
            raise DomainError(
                f"profile non-positive at (b2={value_of(u)}, s={value_of(s)})",
                b2=value_of(u),
                s=value_of(s),
            )
        return out

    return PhiFunction("thm-berwald", dict(params), fn, singular=True)


THEOREM_FAMILIES: dict[str, Callable[[dict], PhiFunction]] = {
    "thm-randers": family_randers,
    "thm-kropina": family_kropina,
    "thm-riemannian": family_riemannian,
    "thm-berwald": family_berwald,
}


def make_theorem_phi(family: str, params: dict) -> PhiFunction:
    try:
        fac = THEOREM_FAMILIES[family]
    except KeyError:
        raise InstanceFormatError(f"unknown profile family {family!r}", field="phi.family")
    return fac(params)


# ---------------------------------------------------------------------------
# residual grids and checks
# ---------------------------------------------------------------------------


def residual_grid(phi: PhiFunction, u_min: float = 0.01, u_max: float = 0.25,
                  count: int = 20, frac_max: float = 0.95):
    """(b^2, s) points with s = frac * b, honoring b0 and the singular flag."""
    if math.isfinite(phi.b0):
        u_max = min(u_max, 0.95 * phi.b0 * phi.b0)
    us = np.linspace(u_min, u_max, count)
    fracs = (
        np.linspace(frac_max / count, frac_max, count)
        if phi.singular
        else np.linspace(-frac_max, frac_max, count)
    )
    return [(float(u), float(f * math.sqrt(u))) for u in us for f in fracs]


def lemma41_residuals(phi: PhiFunction, rho: float, grid) -> PDEResiduals:
    """Max residuals of the two conditions equivalent to isotropic curvature.

    rho = tau/c; rho = 0 checks the unconditionally-flat (quadratic spray)
    case E - s*E2 = H2 - s*H22 = 0.
    """
    rE = rH = 0.0
    for u, s in grid:
        eh = eh_scalars(phi, u, s)
        p = phi_partials(phi, u, s, u_order=0, s_order=1)
        rE = max(rE, abs(eh.E - s * eh.E2 - rho * (p[(0, 0)] - s * p[(0, 1)])))
        rH = max(rH, abs(eh.H2 - s * eh.H22))
    return PDEResiduals({"lemma-E": rE, "lemma-H": rH})


def _pde_terms(phi: PhiFunction, rho: float, params: ClassificationParams, u, s):
    """The four PDE expressions, generic in s (float or jet)."""
    p = phi_partials(phi, u, s, u_order=1, s_order=2)
    f, f1, f2 = p[(0, 0)], p[(1, 0)], p[(0, 1)]
    f12, f22 = p[(1, 1)], p[(0, 2)]
    t1 = params.t1(u)
    t2 = params.t2(u)
    sg = params.sigma(u)
    t = t1 + t2 * s * s
    w = u - s * s
    main = (1.0 - t * w) * f2 + 2.0 * s * f1 - s * (t + sg) * f - 2.0 * rho * f * f
    mixed = (1.0 - w * t) * f22 - 2.0 * f1 + 2.0 * s * f12 + s * t * f2 - t * f
    ds = 4.0 * f1 - s * (2.0 * t2 * w + sg) * f2 - (sg + 2.0 * t2 * s * s) * f - 4.0 * rho * f * f2
    reduced = (
        (2.0 - 2.0 * t1 * w + sg * s * s) * f2
        - (2.0 * t1 + sg) * s * f
        - 4.0 * rho * f * f
        + 4.0 * rho * s * f * f2
    )
    return main, mixed, ds, reduced


def pde_residuals(phi: PhiFunction, rho: float, params: ClassificationParams,
                  grid) -> PDEResiduals:
    out = {"pde-main": 0.0, "pde-mixed": 0.0, "pde-ds": 0.0, "pde-reduced": 0.0}
    for u, s in grid:
        main, mixed, ds, reduced = _pde_terms(phi, rho, params, u, s)
        out["pde-main"] = max(out["pde-main"], abs(main))
        out["pde-mixed"] = max(out["pde-mixed"], abs(mixed))
        out["pde-ds"] = max(out["pde-ds"], abs(ds))
        out["pde-reduced"] = max(out["pde-reduced"], abs(reduced))
    return PDEResiduals(out)


def derivation_identity_residuals(phi: PhiFunction, rho: float,
                                  params: ClassificationParams, grid) -> PDEResiduals:
    """The chain structure itself, checked for an arbitrary profile:
    d(main)/ds - mixed = ds-equation, and 2*main - s*(ds-equation) = reduced."""
    r1 = r2 = 0.0
    space = jetspace(((1, 1),))
    for u, s in grid:
        S = space.variable(0, s)
        main_j, mixed_j, ds_j, red_j = _pde_terms(phi, rho, params, u, S)
        dmain = main_j.deriv({0: 1})
        r1 = max(r1, abs((dmain - mixed_j.value) - ds_j.value))
        r2 = max(r2, abs((2.0 * main_j.value - s * ds_j.value) - red_j.value))
    return PDEResiduals({"identity-ds": r1, "identity-reduced": r2})


def ds3_exactness_check(phi: PhiFunction, rho: float, params: ClassificationParams,
                        grid) -> float:
    """Max |d/ds [ (2 - 2*t1*(b^2-s^2) + sigma*s^2)/phi^2 + 8*rho*s/phi ]|."""
    space = jetspace(((1, 1),))
    worst = 0.0
    for u, s in grid:
        S = space.variable(0, s)
        f = phi(u, S)
        t1 = params.t1(u)
        sg = params.sigma(u)
        bracket = (2.0 - 2.0 * t1 * (u - S * S) + sg * S * S) / (f * f) + 8.0 * rho * S / f
        worst = max(worst, abs(bracket.deriv({0: 1})))
    return worst


def one_order_residual(phi: PhiFunction, t2: ScalarFunc, grid) -> float:
    """Transport equation of the singular branch:
    phi_1 + s/2*(1/b^2 - (b^2-s^2)*t2)*phi_2 = (-1/b^2 + t2*s^2)*phi/2."""
    worst = 0.0
    for u, s in grid:
        p = phi_partials(phi, u, s, u_order=1, s_order=1)
        t2v = t2(u)
        res = (
            p[(1, 0)]
            + 0.5 * s * (1.0 / u - (u - s * s) * t2v) * p[(0, 1)]
            - 0.5 * (-1.0 / u + t2v * s * s) * p[(0, 0)]
        )
        worst = max(worst, abs(res))
    return worst


def _params_at(phi: PhiFunction, rho: float, u: float, s: float):
    """sigma(u), t1(u), t2(u) read off E and H at one point."""
    eh = eh_scalars(phi, u, s)
    p = phi_partials(phi, u, s, u_order=0, s_order=1)
    sig = 2.0 * (eh.E2 - rho * p[(0, 1)])
    return sig, 2.0 * eh.H - eh.H22 * s * s, eh.H22


def recover_params(phi: PhiFunction, rho: float, grid) -> RecoveredParams:
    """Read sigma(b^2), t1(b^2), t2(b^2) off E and H per b^2-slice of the
    grid and report how far E - rho*phi is from linear in s and H from the
    even quadratic (t1 + t2*s^2)/2 within each slice."""
    slices: dict[float, list[float]] = {}
    for u, s in grid:
        slices.setdefault(u, []).append(s)
    dev_s = dev_h = 0.0
    sig = t1v = t2v = None
    for u, ss in slices.items():
        anchor = ss[len(ss) // 2] or ss[-1]
        sig, t1v, t2v = _params_at(phi, rho, u, anchor)
        for s in ss:
            eh = eh_scalars(phi, u, s)
            p = phi_partials(phi, u, s, u_order=0, s_order=1)
            dev_s = max(dev_s, abs(eh.E - rho * p[(0, 0)] - 0.5 * sig * s))
            dev_h = max(dev_h, abs(eh.H - 0.5 * (t1v + t2v * s * s)))
    return RecoveredParams(sigma=sig, t1=t1v, t2=t2v, sigma_deviation=dev_s, h_deviation=dev_h)


def classification_from_profile(phi: PhiFunction, rho: float,
                                frac: float = 0.4) -> ClassificationParams:
    """ClassificationParams whose sigma, t1, t2 are recovered on demand from
    E and H at (u, frac*sqrt(u)); exact whenever the profile belongs to the
    isotropic class, where those functions depend on b^2 alone."""

    def component(idx):
        def f(u):
            return _params_at(phi, rho, float(u), frac * math.sqrt(float(u)))[idx]

        return f

    return ClassificationParams(rho=rho, sigma=component(0), t1=component(1), t2=component(2))


def residual_value(phi: PhiFunction, rho: float, key: str, u: float, s: float) -> float:
    """One named residual at a single (b^2, s) point (signed); the CLI sweep
    backend.  Classification functions are recovered from the profile."""
    if key == "lemma-E":
        eh = eh_scalars(phi, u, s)
        p = phi_partials(phi, u, s, u_order=0, s_order=1)
        return eh.E - s * eh.E2 - rho * (p[(0, 0)] - s * p[(0, 1)])
    if key == "lemma-H":
        eh = eh_scalars(phi, u, s)
        return eh.H2 - s * eh.H22
    params = classification_from_profile(phi, rho)
    if key == "transport":
        p = phi_partials(phi, u, s, u_order=1, s_order=1)
        t2v = params.t2(u)
        return (
            p[(1, 0)]
            + 0.5 * s * (1.0 / u - (u - s * s) * t2v) * p[(0, 1)]
            - 0.5 * (-1.0 / u + t2v * s * s) * p[(0, 0)]
        )
    if key == "pde-exact":
        S = jetspace(((1, 1),)).variable(0, s)
        f = phi(u, S)
        bracket = (2.0 - 2.0 * params.t1(u) * (u - S * S) + params.sigma(u) * S * S) / (f * f) + (
            8.0 * rho * S / f
        )
        return bracket.deriv({0: 1})
    idx = {"pde-main": 0, "pde-mixed": 1, "pde-ds": 2, "pde-reduced": 3}
    if key not in idx:
        raise KeyError(f"unknown residual key {key!r}")
    return _pde_terms(phi, rho, params, u, s)[idx[key]]


def quadratic_spray_check(inst, tau: float, x, rng=None, tol: float = 1e-8):
    """Fit G^i - tau*F*y^i by a quadratic form in y over >= 2n^2 directions;
    small residual confirms the spray is quadratic up to the isotropic term."""
    from .geometry import eval_F
    from .spray import spray_definitional

    n = inst.dim
    if rng is None:
        rng = np.random.default_rng(0)
    a = inst.alpha.matrix(x)
    m = 3 * n * n
    monomials = [(j, k) for j in range(n) for k in range(j, n)]
    rows = []
    targets = []
    count = 0
    while count < m:
        y = rng.normal(size=n)
        y = y / math.sqrt(float(y @ a @ y)) * rng.uniform(0.5, 2.0)
        try:
            F = eval_F(inst, x, y)
            G = spray_definitional(inst, x, y).G
        except DomainError:
            continue
        rows.append([y[j] * y[k] * (1.0 if j == k else 2.0) for j, k in monomials])
        targets.append(G - tau * F * y)
        count += 1
    A = np.array(rows)
    T = np.array(targets)
    coef, *_ = np.linalg.lstsq(A, T, rcond=None)
    residual = float(np.max(np.abs(A @ coef - T)))
    return residual < tol, residual
