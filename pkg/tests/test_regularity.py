"""Pointwise regularity inequalities on (b^2, s) grids."""

import pytest

from finslerlab import check_regularity, make_phi, make_theorem_phi

from conftest import BERWALD_FAMILY_PARAMS, RIEMANNIAN_FAMILY_PARAMS


def test_randers_regular_below_unit_bound():
    phi = make_phi("randers", {})
    rep = check_regularity(phi, b0_probe=1.0, n=3, grid_density=48)
    assert rep.passed
    assert rep.b0_estimate == 1.0
    assert rep.dimension_mode == "n>=3" and not rep.singular


def test_randers_fails_beyond_unit_bound_with_witness():
    phi = make_phi("randers", {})
    rep = check_regularity(phi, b0_probe=1.2, n=3, grid_density=48)
    assert not rep.passed
    assert rep.b0_estimate < 1.0
    witness = [
        v
        for v in rep.violations
        if v.inequality == "phi>0"
        and v.b2 == pytest.approx(1.21, rel=1e-12)
        and v.s == pytest.approx(-1.1, rel=1e-12)
    ]
    assert witness and witness[0].value == pytest.approx(-0.1, abs=1e-12)


def test_riemannian_family_regular():
    phi = make_theorem_phi("thm-riemannian", RIEMANNIAN_FAMILY_PARAMS)
    rep = check_regularity(phi, b0_probe=1.0, n=3, grid_density=24)
    assert rep.passed


def test_kropina_family_flagged_singular_and_fails():
    phi = make_theorem_phi("thm-kropina", {"a": 1.0})
    rep = check_regularity(phi, b0_probe=1.0, n=3, grid_density=16)
    assert rep.singular
    assert not rep.passed
    # phi - s*phi2 = 0 on the whole half-domain
    assert any(v.inequality != "phi>0" for v in rep.violations)


def test_two_dimensional_mode_skips_middle_inequality():
    phi = make_phi("randers", {})
    rep = check_regularity(phi, b0_probe=1.0, n=2, grid_density=16)
    assert rep.passed and rep.dimension_mode == "n=2"


def test_parameter_validation():
    phi = make_phi("randers", {})
    with pytest.raises(ValueError):
        check_regularity(phi, 1.0, n=3, grid_density=4)
    with pytest.raises(ValueError):
        check_regularity(phi, 1.0, n=1)
