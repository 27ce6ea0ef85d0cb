"""Shared fixtures: registered instances and seeded generators."""

import numpy as np
import pytest

from finslerlab import load_instance, registered_instance, theorem_family_instance


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def randers_radial():
    return registered_instance("randers-radial")


@pytest.fixture
def randers_rotational():
    return registered_instance("randers-rotational")


@pytest.fixture
def riemannian_conformal():
    return registered_instance("riemannian-conformal")


@pytest.fixture
def brs():
    return registered_instance("brs")


# thm-randers parameters consistent with rho = 0.3: k(b^2) = 1.2 - 0.72*b^2
RANDERS_FAMILY_PARAMS = {"rho": 0.3, "k": {"poly": [1.2, -0.72]}}
RIEMANNIAN_FAMILY_PARAMS = {"t1": 0.0, "sigma": 2.0, "t3": 0.7071067811865476}
BERWALD_FAMILY_PARAMS = {"t2": 0.5, "varphi": {"poly": [1.0, 1.0]}, "b0_ref": 1.0}


@pytest.fixture
def thm_randers_instance():
    doc = theorem_family_instance(
        {"family": "thm-randers", "params": RANDERS_FAMILY_PARAMS}, dim=3, c=0.1
    )
    return load_instance(doc)


@pytest.fixture
def thm_berwald_instance():
    doc = theorem_family_instance(
        {"family": "thm-berwald", "params": BERWALD_FAMILY_PARAMS}, dim=3, c=0.1
    )
    return load_instance(doc)
