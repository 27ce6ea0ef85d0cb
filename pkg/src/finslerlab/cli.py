"""Command-line harness: instance files in, verification reports out.

Subcommands: ``inspect`` (summary + conformal fit), ``verify`` (check suites
with exit code 0/1/2), ``sweep`` (CSV of E, H, or a named residual over a
(b^2, s) grid), ``family`` (emit an instance file for a solution family).
"""

from __future__ import annotations

import json
import math
import os
import sys
import time
from datetime import datetime, timezone
from importlib.metadata import version as _pkg_version

import click
import numpy as np

from .beta import conformal_check, conformal_fit_at
from .berwald import berwald_closed_form, berwald_oracle, isotropic_fit
from .classify import (
    classification_from_profile,
    ds3_exactness_check,
    lemma41_residuals,
    make_theorem_phi,
    pde_residuals,
    residual_value,
)
from .errors import FinslerError, InstanceFormatError
from .geometry import MetricInstance, compute_b2, load_instance
from .instances import theorem_family_instance
from .regularity import check_regularity
from .sampling import sample_pairs, sample_points
from .spray import spray_definitional, spray_general

DEFAULT_CHECKS = ("spray", "berwald", "isotropic", "lemma41", "pde", "regularity")
DEFAULT_TOLS = {
    "spray": 1e-8,
    "berwald": 1e-7,
    "isotropic": 1e-7,
    "lemma41": 1e-9,
    "pde": 1e-7,
}
SWEEP_QUANTITIES = ("E", "H") + tuple(
    "residual:" + k
    for k in (
        "lemma-E",
        "lemma-H",
        "pde-main",
        "pde-mixed",
        "pde-ds",
        "pde-reduced",
        "pde-exact",
        "transport",
    )
)


def _tool_version() -> str:
    try:
        return _pkg_version("finslerlab")
    except Exception:
        return "unknown"


def _load_instance_file(path: str) -> MetricInstance:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise click.exceptions.Exit(2) from _fail(f"instance file not found: {path}")
    except json.JSONDecodeError as err:
        raise click.exceptions.Exit(2) from _fail(f"invalid JSON in {path}: {err}")
    try:
        return load_instance(doc)
    except InstanceFormatError as err:
        raise click.exceptions.Exit(2) from _fail(str(err))


def _fail(msg: str):
    click.echo(f"error: {msg}", err=True)
    return None


def _seed(seed_opt):
    if seed_opt is not None:
        return int(seed_opt)
    return int(os.environ.get("FINSLER_LAB_SEED", "0"))


def _u_range(inst: MetricInstance, rng) -> tuple[float, float]:
    pts = sample_points(inst, 32, rng)
    us = [compute_b2(inst, x) for x in pts]
    lo, hi = min(us), max(us)
    if hi - lo < 1e-9:
        hi = lo + max(1e-3, 0.1 * lo)
    return lo, hi


def _check_grid(inst: MetricInstance, rng, count: int = 12):
    lo, hi = _u_range(inst, rng)
    lo = max(lo, 1e-4)
    frac_hi = 0.9
    fracs = (
        np.linspace(frac_hi / count, frac_hi, count)
        if inst.phi.singular
        else np.linspace(-frac_hi, frac_hi, count)
    )
    us = np.linspace(lo, hi, count)
    return [(float(u), float(f) * math.sqrt(float(u))) for u in us for f in fracs]


def _emit_report(report: dict, out, no_timestamp: bool):
    if not no_timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    text = json.dumps(report, indent=2, sort_keys=True, default=float)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    else:
        click.echo(text)


@click.group()
@click.version_option(_tool_version(), prog_name="finslerlab")
def main():
    """Verification toolkit for metrics F = alpha*phi(b^2, beta/alpha)."""


@main.command()
@click.argument("instance_file", type=click.Path())
@click.option("--out", type=click.Path(), default=None)
@click.option("--no-timestamp", is_flag=True, default=False)
def inspect(instance_file, out, no_timestamp):
    """Summarize an instance: b^2 and s ranges, regularity, conformal fit."""
    inst = _load_instance_file(instance_file)
    rng = np.random.default_rng(_seed(None))
    lo, hi = _u_range(inst, rng)
    pts = sample_points(inst, 8, rng)
    fits = conformal_check(inst, pts)
    trivial = all(f.trivial for f in fits)
    conformal = all(f.is_conformal_closed for f in fits)
    b0_probe = inst.phi.b0 if math.isfinite(inst.phi.b0) else math.sqrt(hi) * 1.25
    reg = check_regularity(inst.phi, b0_probe, inst.dim, grid_density=16)
    report = {
        "report_version": 1,
        "tool_version": _tool_version(),
        "instance": {"name": inst.name, "dim": inst.dim, "phi_family": inst.phi.family},
        "b2_range": [lo, hi],
        "s_range": [0.0 if inst.phi.singular else -math.sqrt(hi), math.sqrt(hi)],
        "regularity": {"passed": reg.passed, "b0_estimate": reg.b0_estimate},
        "conformal": {
            "closed_conformal": conformal,
            "c_values": [f.c for f in fits],
            "max_residual": max(f.residual for f in fits),
        },
    }
    if trivial:
        report["note"] = "trivial case c=0: the one-form is parallel, curvature vanishes"
    _emit_report(report, out, no_timestamp)


def _run_check_spray(inst, pairs, tol):
    worst = 0.0
    for x, y in pairs:
        d = spray_definitional(inst, x, y).G
        g = spray_general(inst, x, y).G
        worst = max(worst, float(np.max(np.abs(d - g))) / max(1.0, float(np.max(np.abs(d)))))
    return worst, worst < tol, {}


def _run_check_berwald(inst, pairs, tol):
    conformal = all(conformal_fit_at(inst, x).is_conformal_closed for x, _ in pairs)
    worst = 0.0
    for x, y in pairs:
        ref = berwald_oracle(inst, x, y, via="definitional").b
        other = (
            berwald_closed_form(inst, x, y).b
            if conformal
            else berwald_oracle(inst, x, y, via="general").b
        )
        worst = max(worst, float(np.max(np.abs(ref - other))))
    return worst, worst < tol, {"compared_against": "closed-form" if conformal else "general"}


def _run_check_isotropic(inst, pairs, tol):
    fit = isotropic_fit(inst, pairs, tol=tol)
    return fit.residual_max, fit.is_isotropic, {"tau": fit.tau, "is_berwald": fit.is_berwald}


def _run_check_lemma41(inst, grid, tol):
    rho = float(inst.phi.params.get("rho", 0.0))
    res = lemma41_residuals(inst.phi, rho, grid)
    return res.max(), res.max() < tol, {"rho": rho, **res.residuals}


def _run_check_pde(inst, grid, tol):
    rho = float(inst.phi.params.get("rho", 0.0))
    params = classification_from_profile(inst.phi, rho)
    res = pde_residuals(inst.phi, rho, params, grid)
    exact = ds3_exactness_check(inst.phi, rho, params, grid)
    worst = max(res.max(), exact)
    return worst, worst < tol, {**res.residuals, "pde-exact": exact}


def _run_check_regularity(inst, rng):
    lo, hi = _u_range(inst, rng)
    b0_probe = inst.phi.b0 if math.isfinite(inst.phi.b0) else math.sqrt(hi) * 1.25
    rep = check_regularity(inst.phi, b0_probe, inst.dim, grid_density=16)
    return (
        0.0 if rep.passed else float(len(rep.violations)),
        rep.passed,
        {"b0_estimate": rep.b0_estimate, "violations": len(rep.violations)},
    )


@main.command()
@click.argument("instance_file", type=click.Path())
@click.option("--checks", default=",".join(DEFAULT_CHECKS), show_default=True)
@click.option("--samples", default=25, show_default=True, type=int)
@click.option("--seed", default=None, type=int)
@click.option("--tol", "tol_overrides", default="", help="name=value,... tolerance overrides")
@click.option("--out", type=click.Path(), default=None)
@click.option("--no-timestamp", is_flag=True, default=False)
def verify(instance_file, checks, samples, seed, tol_overrides, out, no_timestamp):
    """Run check suites against an instance; exit 0 iff all requested pass."""
    if samples < 1:
        _fail("--samples must be at least 1")
        raise click.exceptions.Exit(2)
    tols = dict(DEFAULT_TOLS)
    for part in filter(None, tol_overrides.split(",")):
        try:
            name, value = part.split("=")
            tols[name.strip()] = float(value)
        except ValueError:
            _fail(f"bad --tol entry {part!r}")
            raise click.exceptions.Exit(2)
    names = [c.strip() for c in checks.split(",") if c.strip()]
    unknown = [c for c in names if c not in DEFAULT_CHECKS]
    if unknown:
        _fail(f"unknown checks: {unknown}")
        raise click.exceptions.Exit(2)
    inst = _load_instance_file(instance_file)
    seed_val = _seed(seed)
    rng = np.random.default_rng(seed_val)
    results = []
    t_start = time.perf_counter()
    pairs = grid = None
    for name in names:
        t0 = time.perf_counter()
        try:
            if name in ("spray", "berwald", "isotropic"):
                if pairs is None:
                    pairs = sample_pairs(inst, samples, rng)
                if name == "spray":
                    residual, ok, extra = _run_check_spray(inst, pairs, tols["spray"])
                elif name == "berwald":
                    residual, ok, extra = _run_check_berwald(inst, pairs, tols["berwald"])
                else:
                    residual, ok, extra = _run_check_isotropic(inst, pairs, tols["isotropic"])
            elif name in ("lemma41", "pde"):
                if grid is None:
                    grid = _check_grid(inst, np.random.default_rng(seed_val))
                runner = _run_check_lemma41 if name == "lemma41" else _run_check_pde
                residual, ok, extra = runner(inst, grid, tols[name])
            else:
                residual, ok, extra = _run_check_regularity(inst, np.random.default_rng(seed_val))
        except FinslerError as err:
            residual, ok, extra = math.inf, False, {"error": f"{type(err).__name__}: {err}"}
        results.append(
            {
                "name": name,
                "residual": residual,
                "tolerance": tols.get(name),
                "pass": bool(ok),
                "seconds": round(time.perf_counter() - t0, 4),
                **extra,
            }
        )
    report = {
        "report_version": 1,
        "tool_version": _tool_version(),
        "instance": {"name": inst.name, "dim": inst.dim, "phi_family": inst.phi.family},
        "seed": seed_val,
        "samples": samples,
        "checks": results,
        "seconds_total": round(time.perf_counter() - t_start, 4),
        "pass": all(r["pass"] for r in results),
    }
    _emit_report(report, out, no_timestamp)
    if not report["pass"]:
        raise click.exceptions.Exit(1)


def _parse_grid(spec: str):
    axes = {}
    for part in filter(None, spec.split(",")):
        name, _, rng = part.partition("=")
        pieces = rng.split(":")
        if len(pieces) == 1:
            axes[name.strip()] = [float(pieces[0])]
        elif len(pieces) == 3:
            start, stop, count = float(pieces[0]), float(pieces[1]), int(pieces[2])
            axes[name.strip()] = list(np.linspace(start, stop, count))
        else:
            raise ValueError(f"bad grid axis {part!r}")
    if set(axes) != {"b2", "s"}:
        raise ValueError("grid must define both b2 and s axes")
    return axes["b2"], axes["s"]


@main.command()
@click.argument("instance_file", type=click.Path())
@click.option("--quantity", required=True)
@click.option("--grid", "grid_spec", default="b2=0.01:0.25:20,s=-0.4:0.4:20", show_default=True)
@click.option("--out", type=click.Path(), required=True)
def sweep(instance_file, quantity, grid_spec, out):
    """Tabulate E, H, or residual:<key> over a (b^2, s) grid as CSV."""
    if quantity not in SWEEP_QUANTITIES:
        _fail(f"unknown quantity {quantity!r}; choose from {', '.join(SWEEP_QUANTITIES)}")
        raise click.exceptions.Exit(2)
    inst = _load_instance_file(instance_file)
    try:
        b2s, ss = _parse_grid(grid_spec)
    except ValueError as err:
        _fail(str(err))
        raise click.exceptions.Exit(2)
    rho = float(inst.phi.params.get("rho", 0.0))
    rows = []
    try:
        for u in b2s:
            for s in ss:
                if quantity in ("E", "H"):
                    from .spray import eh_scalars

                    eh = eh_scalars(inst.phi, u, s)
                    val = eh.E if quantity == "E" else eh.H
                else:
                    val = residual_value(inst.phi, rho, quantity.split(":", 1)[1], u, s)
                rows.append((u, s, val))
    except FinslerError as err:
        _fail(f"evaluation failed: {type(err).__name__}: {err}")
        raise click.exceptions.Exit(1)
    with open(out, "w") as fh:
        fh.write("b2,s,value\n")
        for u, s, val in rows:
            fh.write(f"{u:.17g},{s:.17g},{val:.17g}\n")
    click.echo(f"wrote {len(rows)} rows to {out}")


@main.command()
@click.option("--family", "family_name", required=True)
@click.option("--params", "params_json", default="{}")
@click.option("--dim", default=3, show_default=True, type=int)
@click.option("--c", default=0.1, show_default=True, type=float)
@click.option("--emit", "emit_path", type=click.Path(), required=True)
def family(family_name, params_json, dim, c, emit_path):
    """Emit an instance file pairing a solution-family profile with a radial
    conformal one-form, ready for `verify`."""
    try:
        params = json.loads(params_json)
    except json.JSONDecodeError as err:
        _fail(f"invalid --params JSON: {err}")
        raise click.exceptions.Exit(2)
    try:
        phi = make_theorem_phi(family_name, params)
        doc = theorem_family_instance({"family": family_name, "params": params}, dim=dim, c=c)
        inst = load_instance(doc)
        # surface constructor domain errors (negative radicands etc.) now
        rng = np.random.default_rng(0)
        for x in sample_points(inst, 8, rng):
            u = compute_b2(inst, x)
            probe = 0.5 * math.sqrt(u)
            phi(u, probe)
    except FinslerError as err:
        _fail(f"{type(err).__name__}: {err}")
        raise click.exceptions.Exit(2)
    with open(emit_path, "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    click.echo(f"wrote {emit_path}")


if __name__ == "__main__":
    main()
