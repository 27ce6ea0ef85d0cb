"""Truncated-Taylor arithmetic against hand-computed calculus."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finslerlab.errors import DomainError
from finslerlab.jets import Jet, generic_solve, jetspace, value_of


def test_polynomial_derivatives_exact():
    space = jetspace(((2, 3),))
    x = space.variable(0, 2.0)
    y = space.variable(1, -1.0)
    f = x * x * y + 3.0 * x + y * y * y
    assert f.value == 2.0 * 2.0 * (-1.0) + 6.0 + (-1.0) ** 3
    assert f.deriv({0: 1}) == 2.0 * 2.0 * (-1.0) + 3.0  # 2xy + 3
    assert f.deriv({1: 1}) == 4.0 + 3.0  # x^2 + 3y^2
    assert f.deriv({0: 1, 1: 1}) == 4.0  # 2x
    assert f.deriv({0: 2}) == -2.0  # 2y
    assert f.deriv({1: 3}) == 6.0


def test_deriv_outside_space_raises():
    space = jetspace(((1, 2),))
    x = space.variable(0, 1.0)
    with pytest.raises(ValueError):
        (x * x).deriv({0: 3})


def test_analytic_functions_match_closed_forms():
    space = jetspace(((1, 4),))
    t0 = 0.7
    t = space.variable(0, t0)
    f = (t * t + 1.0).sqrt()
    # d/dt sqrt(t^2+1) = t / sqrt(t^2+1)
    assert f.deriv({0: 1}) == pytest.approx(t0 / math.sqrt(t0 * t0 + 1.0), rel=1e-14)
    g = t.exp() * t.log()
    d = math.exp(t0) * math.log(t0) + math.exp(t0) / t0
    assert g.deriv({0: 1}) == pytest.approx(d, rel=1e-13)
    r = t.reciprocal()
    assert r.deriv({0: 2}) == pytest.approx(2.0 / t0**3, rel=1e-13)
    p = t ** (-2)
    assert p.value == pytest.approx(t0**-2, rel=1e-14)
    frac = t**0.5
    assert frac.deriv({0: 1}) == pytest.approx(0.5 * t0**-0.5, rel=1e-13)


def test_exp_log_roundtrip():
    space = jetspace(((2, 3),))
    x = space.variable(0, 1.3)
    y = space.variable(1, 0.4)
    f = x * x + y + 0.5
    back = f.log().exp()
    np.testing.assert_allclose(back.c, f.c, rtol=1e-13, atol=1e-13)


def test_domain_errors_on_bad_values():
    space = jetspace(((1, 2),))
    t = space.variable(0, -1.0)
    with pytest.raises(DomainError):
        t.sqrt()
    with pytest.raises(DomainError):
        t.log()
    with pytest.raises(ZeroDivisionError):
        space.constant(0.0).reciprocal()


def test_partial_restricted_lifted_roundtrip():
    big = jetspace(((2, 3), (1, 1)))
    sub = jetspace(((2, 3),))
    x = big.variable(0, 1.0)
    y = big.variable(1, 2.0)
    z = big.variable(2, 3.0)
    f = x * y * z + x * x
    # partial in z then restrict to the leading group
    fz = f.partial(2).restricted(sub)
    assert fz.deriv({0: 1, 1: 1}) == 1.0  # d^3 f / dz dx dy
    g = sub.variable(0, 1.0) * sub.variable(1, 2.0)
    lifted = g.lifted(big)
    assert lifted.deriv({0: 1, 1: 1}) == 1.0
    np.testing.assert_array_equal(lifted.restricted(sub).c, g.c)


def test_without_zeroes_variables():
    space = jetspace(((2, 2),))
    x = space.variable(0, 1.0)
    y = space.variable(1, 2.0)
    f = x * y + x + y
    g = f.without([1])
    # every monomial with a y exponent is zeroed; coefficients are Taylor
    # coefficients around the base point, so d/dx keeps y's base value folded in
    assert g.deriv({1: 1}) == 0.0
    assert g.deriv({0: 1, 1: 1}) == 0.0
    assert g.deriv({0: 1}) == f.deriv({0: 1})  # (1, 0) monomial untouched


def test_generic_solve_matches_numpy(rng):
    A = rng.normal(size=(4, 4)) + 4.0 * np.eye(4)
    b = rng.normal(size=4)
    got = generic_solve([list(r) for r in A], list(b))
    np.testing.assert_allclose(got, np.linalg.solve(A, b), rtol=1e-12)


def test_generic_solve_with_jet_entries():
    space = jetspace(((1, 1),))
    t = space.variable(0, 2.0)
    # solve [[t, 1], [1, t]] z = [1, 0]: z0 = t/(t^2-1), z1 = -1/(t^2-1)
    z = generic_solve([[t, 1.0], [1.0, t]], [space.constant(1.0), space.constant(0.0)])
    t0 = 2.0
    assert value_of(z[0]) == pytest.approx(t0 / (t0 * t0 - 1.0), rel=1e-14)
    dz0 = (-(t0 * t0 + 1.0)) / (t0 * t0 - 1.0) ** 2
    assert z[0].deriv({0: 1}) == pytest.approx(dz0, rel=1e-13)


def test_value_of_passthrough():
    assert value_of(3) == 3.0
    space = jetspace(((1, 1),))
    assert value_of(space.constant(2.5)) == 2.5


coeff = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)


@settings(max_examples=40, deadline=None)
@given(st.lists(coeff, min_size=1, max_size=6), st.lists(coeff, min_size=1, max_size=6))
def test_product_commutes_and_distributes(ca, cb):
    space = jetspace(((2, 3),))
    a = space.constant(0.0)
    b = space.constant(0.0)
    a.c[: len(ca)] = ca
    b.c[: len(cb)] = cb
    np.testing.assert_allclose((a * b).c, (b * a).c, rtol=1e-12, atol=1e-12)
    lhs = a * (b + 1.5)
    rhs = a * b + 1.5 * a
    np.testing.assert_allclose(lhs.c, rhs.c, rtol=1e-12, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.2, max_value=4.0, allow_nan=False))
def test_sqrt_squares_back(v):
    space = jetspace(((1, 4),))
    t = space.variable(0, v)
    f = t * t + 1.0
    g = f.sqrt()
    np.testing.assert_allclose((g * g).c, f.c, rtol=1e-12, atol=1e-12)


def test_mixed_space_arithmetic_rejected():
    a = jetspace(((1, 2),)).constant(1.0)
    b = jetspace(((1, 3),)).constant(1.0)
    with pytest.raises(ValueError):
        a + b


def test_jet_repr_mentions_terms():
    space = jetspace(((1, 1),))
    assert "x^" in repr(space.variable(0, 1.0))
    assert isinstance(space.constant(0.0), Jet)
