"""Curvature tensor: independent oracles, the closed-conformal formula, and
the isotropic fit."""

import math

import numpy as np
import pytest

from finslerlab import (
    SingularMetricError,
    berwald_closed_form,
    berwald_oracle,
    eval_F,
    f_jets_closed,
    isotropic_fit,
    isotropic_pattern,
    load_instance,
    registered_instance,
    sample_pairs,
    squared_norm_series,
)
from finslerlab.instances import CONFORMAL_CLOSED

X = np.array([0.2, -0.1, 0.3])
Y = np.array([1.0, 0.5, -0.2])


def test_oracle_paths_agree(randers_radial, brs):
    for inst in (randers_radial, brs):
        d = berwald_oracle(inst, X, Y, via="definitional").b
        g = berwald_oracle(inst, X, Y, via="general").b
        assert float(np.max(np.abs(d - g))) < 1e-11


def test_oracle_rejects_unknown_path(randers_radial):
    with pytest.raises(ValueError):
        berwald_oracle(randers_radial, X, Y, via="magic")


@pytest.mark.parametrize("name", CONFORMAL_CLOSED)
def test_closed_form_matches_oracle(name):
    inst = registered_instance(name)
    rng = np.random.default_rng(7)
    for x, y in sample_pairs(inst, 3, rng):
        ref = berwald_oracle(inst, x, y).b
        got = berwald_closed_form(inst, x, y).b
        assert float(np.max(np.abs(ref - got))) < 1e-9


def test_riemannian_profile_curvature_vanishes(riemannian_conformal):
    B = berwald_oracle(riemannian_conformal, X, Y)
    assert B.max_abs() < 1e-12


def test_parallel_one_form_curvature_vanishes():
    inst = load_instance(
        {
            "dim": 3,
            "alpha": {"family": "euclidean", "params": {}},
            "beta": {"family": "constant", "params": {"values": [0.1, 0.05, 0.2]}},
            "phi": {"family": "randers", "params": {}},
        }
    )
    assert berwald_oracle(inst, X, Y).max_abs() < 1e-11
    assert berwald_closed_form(inst, X, Y).max_abs() < 1e-12


def test_tensor_symmetry_and_euler_identity(randers_radial):
    B = berwald_oracle(randers_radial, X, Y).b
    np.testing.assert_array_equal(B, np.swapaxes(B, 1, 2))
    np.testing.assert_array_equal(B, np.swapaxes(B, 2, 3))
    # the spray is 2-homogeneous, so contracting any derivative slot with y vanishes
    contracted = np.einsum("ijkl,l->ijk", B, Y)
    assert float(np.max(np.abs(contracted))) < 1e-10 * max(1.0, float(np.max(np.abs(B))))


def test_f_jets_closed_against_series(randers_radial):
    fj = f_jets_closed(randers_radial, X, Y)
    space, F2 = squared_norm_series(randers_radial, X, Y, y_order=3)
    F = F2.sqrt()
    n = 3
    for j in range(n):
        assert fj.Fy[j] == pytest.approx(F.deriv({j: 1}), rel=1e-12, abs=1e-13)
        for k in range(n):
            orders = {j: 1, k: 1} if j != k else {j: 2}
            assert fj.Fyy[j, k] == pytest.approx(F.deriv(orders), rel=1e-11, abs=1e-12)
    got = fj.Fyyy[0, 1, 2]
    assert got == pytest.approx(F.deriv({0: 1, 1: 1, 2: 1}), rel=1e-10, abs=1e-12)
    assert fj.Fyyy[2, 2, 2] == pytest.approx(F.deriv({2: 3}), rel=1e-10, abs=1e-12)


def test_pattern_structure(randers_radial):
    P = isotropic_pattern(randers_radial, X, Y)
    fj = f_jets_closed(randers_radial, X, Y)
    # spot check one entry against the defining combination
    i, j, k, l = 0, 1, 2, 0
    want = (
        fj.Fyy[j, k] * (i == l)
        + fj.Fyy[j, l] * (i == k)
        + fj.Fyy[k, l] * (i == j)
        + fj.Fyyy[j, k, l] * Y[i]
    )
    assert P[i, j, k, l] == pytest.approx(want, rel=1e-14)


def test_isotropic_fit_positive_case(thm_randers_instance):
    rng = np.random.default_rng(2)
    pairs = sample_pairs(thm_randers_instance, 8, rng)
    fit = isotropic_fit(thm_randers_instance, pairs)
    assert fit.is_isotropic and not fit.is_berwald
    assert fit.tau == pytest.approx(0.3 * 0.1, abs=1e-9)  # rho * c


def test_isotropic_fit_negative_case(randers_radial):
    rng = np.random.default_rng(2)
    pairs = sample_pairs(randers_radial, 8, rng)
    fit = isotropic_fit(randers_radial, pairs)
    assert not fit.is_isotropic and not fit.is_berwald
    assert fit.residual_max > 1e-5


def test_isotropic_fit_berwald_case(riemannian_conformal):
    rng = np.random.default_rng(2)
    pairs = sample_pairs(riemannian_conformal, 6, rng)
    fit = isotropic_fit(riemannian_conformal, pairs)
    assert fit.is_berwald and fit.is_isotropic
    assert abs(fit.tau) < 1e-10
