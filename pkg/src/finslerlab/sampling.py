"""Seeded (x, y) sampling inside an instance's domain box.

Directions are drawn Gaussian, normalized to the unit alpha-sphere, then
rescaled, so homogeneity tests see a spread of magnitudes.  For singular
profiles (positive only for s > 0) the sign of y is flipped to make beta(y)
positive and directions nearly alpha-orthogonal to beta are rejected to keep
s bounded away from 0.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .geometry import MetricInstance, compute_b2, compute_s


def sample_points(inst: MetricInstance, count: int, rng) -> np.ndarray:
    low, high = inst.box()
    return rng.uniform(low, high, size=(count, inst.dim))


def sample_direction(inst: MetricInstance, x, rng, scale_range=(0.5, 2.0)) -> np.ndarray:
    a = inst.alpha.matrix(x)
    b2 = compute_b2(inst, x)
    for _ in range(200):
        y = rng.normal(size=inst.dim)
        norm = math.sqrt(float(y @ a @ y))
        if norm < 1e-12:
            continue
        y = y / norm * rng.uniform(*scale_range)
        s = compute_s(inst, x, y)
        if inst.phi.singular:
            if s < 0.0:
                y, s = -y, -s
            # keep s away from the s=0 edge of the half-domain
            if s < 0.1 * math.sqrt(b2):
                continue
        try:
            from .geometry import check_domain

            check_domain(inst, b2, s, point=x)
        except DomainError:
            continue
        return y
    raise DomainError(f"could not sample an admissible direction at x={x}", b2=b2, point=x)


def sample_pairs(inst: MetricInstance, count: int, rng):
    xs = sample_points(inst, count, rng)
    return [(x, sample_direction(inst, x, rng)) for x in xs]
