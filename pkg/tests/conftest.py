"""Shared fixtures and deterministic test configuration."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from complex_sturm import (
    BoundaryFunctional,
    BoundarySpec,
    Realization,
    parse_interval,
    parse_potential,
)

settings.register_profile(
    "suite",
    deadline=None,
    derandomize=True,
    max_examples=20,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture
def rng():
    return np.random.default_rng(0)


def make_potential(text, interval):
    return parse_potential(text, parse_interval(interval))


def make_realization(text, interval, bc_a, bc_b):
    """Realization with regular-vector or absent boundary data per side.

    ``bc_a`` / ``bc_b`` are (alpha0, alpha1) pairs or None for no condition.
    """
    p = make_potential(text, interval)
    at_a = None if bc_a is None else BoundaryFunctional.from_vector(
        "a", bc_a[0], bc_a[1])
    at_b = None if bc_b is None else BoundaryFunctional.from_vector(
        "b", bc_b[0], bc_b[1])
    return Realization(p, BoundarySpec(at_a=at_a, at_b=at_b))


DIRICHLET = (0.0, 1.0)
NEUMANN = (1.0, 0.0)


@pytest.fixture
def free_unit():
    """V = 0 on ]0,1[."""
    return make_potential("0", "0,1")


@pytest.fixture
def free_pi():
    """V = 0 on ]0,pi[."""
    return make_potential("0", "0,pi")


@pytest.fixture
def free_halfline():
    """V = 0 on ]0,inf[."""
    return make_potential("0", "0,inf")
