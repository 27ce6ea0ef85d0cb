"""Metric data model for F = alpha * phi(b^2, beta/alpha).

A :class:`MetricInstance` bundles a Riemannian metric field a_ij(x), a
one-form field b_i(x) and a two-variable profile function phi.  Fields are
supplied as analytic families from a registry and evaluate transparently on
jets, so every coordinate derivative used downstream is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .errors import DomainError, InstanceFormatError, SingularMetricError
from .jets import Jet, exp, jetspace, sqrt, value_of

# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricField:
    """Symmetric positive-definite matrix field a_ij(x), AD-transparent."""

    family: str
    params: dict
    fn: Callable  # x (floats or jets) -> n x n nested list

    def matrix(self, x) -> np.ndarray:
        return np.array(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def dmatrix(self, x) -> np.ndarray:
        """d a_ij / d x^k, indexed [i, j, k], by exact AD."""
        x = np.asarray(x, dtype=float)
        n = len(x)
        space = jetspace(((n, 1),))
        rows = self.fn(space.variables(x))
        out = np.zeros((n, n, n))
        for i in range(n):
            for j in range(n):
                e = rows[i][j]
                if isinstance(e, Jet):
                    for k in range(n):
                        out[i, j, k] = e.deriv({k: 1})
        return out


@dataclass(frozen=True)
class OneFormField:
    """Covector field b_i(x), AD-transparent."""

    family: str
    params: dict
    fn: Callable  # x -> length-n list

    def values(self, x) -> np.ndarray:
        return np.array(self.fn(np.asarray(x, dtype=float)), dtype=float)

    def dvalues(self, x) -> np.ndarray:
        """d b_i / d x^j, indexed [i, j], by exact AD."""
        x = np.asarray(x, dtype=float)
        n = len(x)
        space = jetspace(((n, 1),))
        vals = self.fn(space.variables(x))
        out = np.zeros((n, n))
        for i in range(n):
            if isinstance(vals[i], Jet):
                for j in range(n):
                    out[i, j] = vals[i].deriv({j: 1})
        return out


@dataclass(frozen=True)
class PhiFunction:
    """Profile function phi(b^2, s) on {|s| <= sqrt(b^2) < b0}.

    ``singular`` marks families proportional to s, which are positive only
    for s > 0 and are evaluated on that half-domain exclusively.
    """

    family: str
    params: dict
    fn: Callable  # (u, s) floats or jets -> float or jet
    b0: float = math.inf
    singular: bool = False

    def __call__(self, u, s):
        return self.fn(u, s)


@dataclass(frozen=True)
class PhiJet:
    """All partials of phi in (b^2, s) up to total order 5 at one point."""

    u: float
    s: float
    partials: dict  # (i, j) -> value

    def p(self, i: int, j: int) -> float:
        return self.partials[(i, j)]


@dataclass(frozen=True)
class MetricInstance:
    dim: int
    alpha: MetricField
    beta: OneFormField
    phi: PhiFunction
    name: str = ""
    domain_low: tuple = ()
    domain_high: tuple = ()

    def box(self):
        if self.domain_low:
            return np.array(self.domain_low), np.array(self.domain_high)
        return -0.5 * np.ones(self.dim), 0.5 * np.ones(self.dim)


# ---------------------------------------------------------------------------
# core operations
# ---------------------------------------------------------------------------


def compute_b2(inst: MetricInstance, x) -> float:
    """b^2 = a^{ij} b_i b_j at x."""
    a = inst.alpha.matrix(x)
    b = inst.beta.values(x)
    try:
        z = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as err:
        raise SingularMetricError(f"a(x) singular at x={x}: {err}") from err
    return float(b @ z)


def compute_s(inst: MetricInstance, x, y) -> float:
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise DomainError("direction y must be nonzero", point=x)
    a = inst.alpha.matrix(x)
    alpha = math.sqrt(float(y @ a @ y))
    beta = float(inst.beta.values(x) @ y)
    return beta / alpha


def check_domain(inst: MetricInstance, b2: float, s: float, point=None) -> None:
    b = math.sqrt(max(b2, 0.0))
    if abs(s) > b + 1e-12:
        raise DomainError(f"|s|={abs(s):.6g} exceeds b={b:.6g}", b2=b2, s=s, point=point)
    if b >= inst.phi.b0:
        raise DomainError(f"b={b:.6g} outside b0={inst.phi.b0}", b2=b2, s=s, point=point)
    if inst.phi.singular and s <= 0.0:
        raise DomainError(
            f"singular profile requires s > 0, got s={s:.6g}", b2=b2, s=s, point=point
        )


def eval_F(inst: MetricInstance, x, y) -> float:
    b2 = compute_b2(inst, x)
    s = compute_s(inst, x, y)
    check_domain(inst, b2, s, point=x)
    a = inst.alpha.matrix(x)
    y = np.asarray(y, dtype=float)
    alpha = math.sqrt(float(y @ a @ y))
    F = alpha * value_of(inst.phi(b2, s))
    if F <= 0.0:
        raise DomainError(f"F non-positive ({F:.6g}) at b2={b2:.6g}, s={s:.6g}", b2=b2, s=s)
    return F


def squared_norm_series(inst: MetricInstance, x, y, y_order: int, x_order: int = 0):
    """Jet of F^2 around (x, y): direction jets to ``y_order``, base-point jets
    to ``x_order``.  Returns (space, F2_jet) with y-variables leading.

    This is the oracle workhorse: all y- and x-derivatives of F^2 used by the
    geodesic coefficients and their third direction-derivatives come out of
    this one expansion.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = inst.dim
    if x_order > 0:
        space = jetspace(((n, y_order), (n, x_order)))
        X = space.variables(x, offset=n)
    else:
        space = jetspace(((n, y_order),))
        X = x
    Y = space.variables(y)
    a = inst.alpha.fn(X)
    bvec = inst.beta.fn(X)
    alpha2 = _quadratic(a, Y, Y)
    beta = _dot(bvec, Y)
    b2 = _b2_generic(a, bvec)
    alpha = sqrt(alpha2)
    s = beta / alpha
    check_domain(inst, value_of(b2), value_of(s), point=x)
    phi = inst.phi(b2, s)
    F2 = alpha2 * phi * phi
    return space, F2


def fundamental_tensor(inst: MetricInstance, x, y) -> np.ndarray:
    """g_ij = half the y-Hessian of F^2.  Reports the violated eigenvalue if
    strong convexity fails."""
    n = inst.dim
    space, F2 = squared_norm_series(inst, x, y, y_order=2)
    g = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = 0.5 * F2.deriv({i: 1, j: 1} if i != j else {i: 2})
    w = np.linalg.eigvalsh(g)
    if w[0] <= 0.0:
        raise SingularMetricError(
            f"fundamental tensor not positive definite (eigenvalue {w[0]:.6g}) at x={x}, y={y}"
        )
    return g


def phi_partials(phi: PhiFunction, u, s, u_order: int, s_order: int) -> dict:
    """Partials of phi at (u, s) for all (i, j) with i <= u_order, j <= s_order.

    Floats in, floats out; jet arguments are threaded through an extended
    space so the chain rule is applied automatically.
    """
    if isinstance(u, Jet) or isinstance(s, Jet):
        base = u.space if isinstance(u, Jet) else s.space
        ext = base.extend(((1, u_order), (1, s_order)))
        du, ds = base.nvars, base.nvars + 1
        U = u.lifted(ext) if isinstance(u, Jet) else ext.constant(float(u))
        if u_order:
            U = U + ext.variable(du, 0.0)
        S = s.lifted(ext) if isinstance(s, Jet) else ext.constant(float(s))
        if s_order:
            S = S + ext.variable(ds, 0.0)
        val = phi(U, S)
        out = {}
        for i in range(u_order + 1):
            di = val if i == 0 else val.partial(du, i)
            for j in range(s_order + 1):
                dij = di if j == 0 else di.partial(ds, j)
                out[(i, j)] = dij.restricted(base)
        return out
    space = jetspace(((1, u_order), (1, s_order)))
    U = space.variable(0, float(u)) if u_order else space.constant(float(u))
    S = space.variable(1, float(s)) if s_order else space.constant(float(s))
    val = phi(U, S)
    out = {}
    for i in range(u_order + 1):
        for j in range(s_order + 1):
            out[(i, j)] = val.deriv({0: i, 1: j}) if isinstance(val, Jet) else (
                float(val) if i == j == 0 else 0.0
            )
    return out


def phi_jet(phi: PhiFunction, u: float, s: float) -> PhiJet:
    """Full mixed-partial table of phi to total order 5 at (u, s)."""
    space = jetspace(((2, 5),))
    val = phi(space.variable(0, float(u)), space.variable(1, float(s)))
    partials = {}
    for i in range(6):
        for j in range(6 - i):
            if isinstance(val, Jet):
                partials[(i, j)] = val.deriv({0: i, 1: j})
            else:
                partials[(i, j)] = float(val) if i == j == 0 else 0.0
    return PhiJet(u=float(u), s=float(s), partials=partials)


# ---------------------------------------------------------------------------
# generic small linear algebra on mixed float/jet entries
# ---------------------------------------------------------------------------


def _dot(v, w):
    acc = v[0] * w[0]
    for i in range(1, len(v)):
        acc = acc + v[i] * w[i]
    return acc


def _quadratic(a, v, w):
    acc = None
    for i in range(len(v)):
        for j in range(len(w)):
            term = a[i][j] * v[i] * w[j]
            acc = term if acc is None else acc + term
    return acc


def _b2_generic(a, b):
    from .jets import generic_solve

    if all(not isinstance(e, Jet) for row in a for e in row) and all(
        not isinstance(e, Jet) for e in b
    ):
        am = np.array(a, dtype=float)
        bv = np.array(b, dtype=float)
        try:
            return float(bv @ np.linalg.solve(am, bv))
        except np.linalg.LinAlgError as err:
            raise SingularMetricError(str(err)) from err
    z = generic_solve(a, list(b))
    return _dot(b, z)


# ---------------------------------------------------------------------------
# field families
# ---------------------------------------------------------------------------


def _alpha_euclidean(params, n):
    ident = [[1.0 if i == j else 0.0 for j in range(n)] for i in range(n)]

    def fn(x):
        return ident

    return fn


def _alpha_conformal_flat(params, n):
    grad = [float(g) for g in params.get("grad", [0.1] + [0.0] * (n - 1))]
    if len(grad) != n:
        raise InstanceFormatError(f"grad must have length {n}", field="alpha.params.grad")

    def fn(x):
        u = _dot(grad, x)
        w = exp(2.0 * u)
        return [[w if i == j else 0.0 * w for j in range(n)] for i in range(n)]

    return fn


def _alpha_spherical(params, n):
    kappa = float(params.get("kappa", 1.0))

    def fn(x):
        q = 1.0 + (kappa / 4.0) * _dot(x, x)
        w = (q * q).reciprocal() if isinstance(q, Jet) else 1.0 / (q * q)
        return [[w if i == j else 0.0 * w for j in range(n)] for i in range(n)]

    return fn


def _alpha_brs(params, n):
    eps = float(params.get("eps", 0.2))

    def fn(x):
        r2 = _dot(x, x)
        d = 1.0 - eps * eps * r2
        d2inv = (d * d).reciprocal() if isinstance(d, Jet) else 1.0 / (d * d)
        return [
            [(eps * eps * x[i] * x[j] + (d if i == j else 0.0)) * d2inv for j in range(n)]
            for i in range(n)
        ]

    return fn


def _beta_zero(params, n):
    def fn(x):
        return [0.0] * n

    return fn


def _beta_constant(params, n):
    vals = [float(v) for v in params["values"]]
    if len(vals) != n:
        raise InstanceFormatError(f"values must have length {n}", field="beta.params.values")

    def fn(x):
        return list(vals)

    return fn


def _beta_radial(params, n):
    c = float(params.get("c", 0.1))

    def fn(x):
        return [c * x[i] for i in range(n)]

    return fn


def _beta_rotational(params, n):
    c = float(params.get("c", 0.1))

    def fn(x):
        out = [-c * x[1], c * x[0]]
        out.extend(0.0 * x[i] for i in range(2, n))
        return out

    return fn


def _beta_brs(params, n):
    eps = float(params.get("eps", 0.2))

    def fn(x):
        d = 1.0 - eps * eps * _dot(x, x)
        dinv = d.reciprocal() if isinstance(d, Jet) else 1.0 / d
        return [-eps * x[i] * dinv for i in range(n)]

    return fn


def _beta_concircular(params, n):
    # gradient of the concircular function (1 - q)/(1 + q), q = (kappa/4)|x|^2,
    # on the curvature-kappa space form; closed and conformal with varying factor.
    kappa = float(params.get("kappa", 1.0))
    scale = float(params.get("scale", 0.1))

    def fn(x):
        q = 1.0 + (kappa / 4.0) * _dot(x, x)
        w = (q * q).reciprocal() if isinstance(q, Jet) else 1.0 / (q * q)
        return [-scale * kappa * x[i] * w for i in range(n)]

    return fn


ALPHA_FAMILIES = {
    "euclidean": _alpha_euclidean,
    "conformal-flat": _alpha_conformal_flat,
    "spherical": _alpha_spherical,
    "brs": _alpha_brs,
}

BETA_FAMILIES = {
    "zero": _beta_zero,
    "constant": _beta_constant,
    "radial": _beta_radial,
    "rotational": _beta_rotational,
    "brs": _beta_brs,
    "concircular": _beta_concircular,
}


def _phi_riemannian(params):
    return PhiFunction("riemannian", dict(params), lambda u, s: 1.0 + 0.0 * s, b0=math.inf)


def _phi_randers(params):
    return PhiFunction("randers", dict(params), lambda u, s: 1.0 + s, b0=1.0)


def _phi_navigation(params):
    def fn(u, s):
        return (sqrt((1.0 - u) + s * s) + s) / (1.0 - u)

    return PhiFunction("navigation-randers", dict(params), fn, b0=1.0)


PHI_FAMILIES: dict[str, Callable[[dict], PhiFunction]] = {
    "riemannian": _phi_riemannian,
    "randers": _phi_randers,
    "navigation-randers": _phi_navigation,
}


def make_alpha(family: str, params: dict, n: int) -> MetricField:
    try:
        fac = ALPHA_FAMILIES[family]
    except KeyError:
        raise InstanceFormatError(f"unknown metric family {family!r}", field="alpha.family")
    return MetricField(family, dict(params), fac(params, n))


def make_beta(family: str, params: dict, n: int) -> OneFormField:
    try:
        fac = BETA_FAMILIES[family]
    except KeyError:
        raise InstanceFormatError(f"unknown one-form family {family!r}", field="beta.family")
    return OneFormField(family, dict(params), fac(params, n))


def make_phi(family: str, params: dict) -> PhiFunction:
    if family.startswith("thm-"):
        from . import classify

        return classify.make_theorem_phi(family, params)
    try:
        fac = PHI_FAMILIES[family]
    except KeyError:
        raise InstanceFormatError(f"unknown profile family {family!r}", field="phi.family")
    return fac(params)


def navigation_randers(abar: MetricField, bbar: OneFormField, n: int, name="") -> MetricInstance:
    """Randers instance built from navigation data (abar, bbar), ||bbar|| < 1."""
    return MetricInstance(
        dim=n, alpha=abar, beta=bbar, phi=_phi_navigation({}), name=name or "navigation"
    )


# ---------------------------------------------------------------------------
# instance definition files
# ---------------------------------------------------------------------------


def load_instance(doc: dict) -> MetricInstance:
    """Build a MetricInstance from a parsed definition document."""

    def need(d, key, where):
        if key not in d:
            raise InstanceFormatError("missing field", field=f"{where}.{key}" if where else key)
        return d[key]

    if not isinstance(doc, dict):
        raise InstanceFormatError("instance document must be an object")
    dim = need(doc, "dim", "")
    if not isinstance(dim, int) or dim < 2:
        raise InstanceFormatError("dim must be an integer >= 2", field="dim")
    sections = {}
    for key in ("alpha", "beta", "phi"):
        sec = need(doc, key, "")
        if not isinstance(sec, dict):
            raise InstanceFormatError("must be an object", field=key)
        fam = need(sec, "family", key)
        params = sec.get("params", {})
        if not isinstance(params, dict):
            raise InstanceFormatError("params must be an object", field=f"{key}.params")
        sections[key] = (fam, params)
    alpha = make_alpha(*sections["alpha"], dim)
    beta = make_beta(*sections["beta"], dim)
    phi = make_phi(*sections["phi"])
    if "b0" in doc:
        phi = PhiFunction(phi.family, phi.params, phi.fn, b0=float(doc["b0"]), singular=phi.singular)
    dom = doc.get("domain", {})
    low = tuple(dom.get("low", ()))
    high = tuple(dom.get("high", ()))
    if (low or high) and (len(low) != dim or len(high) != dim):
        raise InstanceFormatError(f"domain bounds must have length {dim}", field="domain")
    return MetricInstance(
        dim=dim,
        alpha=alpha,
        beta=beta,
        phi=phi,
        name=str(doc.get("name", "")),
        domain_low=low,
        domain_high=high,
    )


def instance_doc(inst: MetricInstance) -> dict:
    doc = {
        "dim": inst.dim,
        "alpha": {"family": inst.alpha.family, "params": inst.alpha.params},
        "beta": {"family": inst.beta.family, "params": inst.beta.params},
        "phi": {"family": inst.phi.family, "params": inst.phi.params},
    }
    if math.isfinite(inst.phi.b0):
        doc["b0"] = inst.phi.b0
    if inst.name:
        doc["name"] = inst.name
    if inst.domain_low:
        doc["domain"] = {"low": list(inst.domain_low), "high": list(inst.domain_high)}
    return doc
