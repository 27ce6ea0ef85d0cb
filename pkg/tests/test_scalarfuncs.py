"""Serializable scalar-function specs."""

import pytest

from finslerlab.errors import InstanceFormatError
from finslerlab.jets import jetspace
from finslerlab.scalarfuncs import CONST_ONE, CONST_ZERO, const, inverse_u, scalar_func


def test_constant_spec():
    f = scalar_func(2.5)
    assert f(0.3) == 2.5
    assert CONST_ZERO(7.0) == 0.0
    assert CONST_ONE(7.0) == 1.0
    assert const(-3)(1.0) == -3.0


def test_poly_spec():
    f = scalar_func({"poly": [1.0, -2.0, 3.0]})
    u = 0.4
    assert f(u) == pytest.approx(1.0 - 2.0 * u + 3.0 * u * u, rel=1e-15)


def test_rational_spec_and_inverse_u():
    f = scalar_func({"rational": {"num": [1.0, 1.0], "den": [2.0, 0.0, 1.0]}})
    u = 0.7
    assert f(u) == pytest.approx((1.0 + u) / (2.0 + u * u), rel=1e-15)
    g = inverse_u(3.0)
    assert g(0.5) == pytest.approx(6.0, rel=1e-15)


def test_specs_are_jet_transparent():
    f = scalar_func({"poly": [1.0, 0.0, 2.0]})
    U = jetspace(((1, 2),)).variable(0, 1.5)
    j = f(U)
    assert j.value == pytest.approx(1.0 + 2.0 * 1.5**2, rel=1e-15)
    assert j.deriv({0: 1}) == pytest.approx(4.0 * 1.5, rel=1e-15)
    assert j.deriv({0: 2}) == pytest.approx(4.0, rel=1e-15)
    c = scalar_func(5.0)(U)
    assert c.value == 5.0 and c.deriv({0: 1}) == 0.0


@pytest.mark.parametrize(
    "bad",
    [
        "not-a-spec",
        {"poly": []},
        {"poly": [1.0, "x"]},
        {"rational": {"num": [1.0]}},
        {"spline": [1, 2]},
        None,
    ],
)
def test_invalid_specs_rejected(bad):
    with pytest.raises(InstanceFormatError):
        scalar_func(bad)
