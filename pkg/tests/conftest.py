"""Shared fixtures: the period solve and a mid-resolution mesh patch are
expensive, so they are computed once per session and shared."""

import numpy as np
import pytest

from g1helicoid.mesh import assemble_fundamental_domain, mesh_patch_D
from g1helicoid.period_solver import solve_period_problem
from g1helicoid.torus import build_chart


@pytest.fixture(scope="session")
def solution():
    return solve_period_problem()


@pytest.fixture(scope="session")
def params(solution):
    return solution.params


@pytest.fixture(scope="session")
def chart(params):
    return build_chart(params)


@pytest.fixture(scope="session")
def patch(params):
    return mesh_patch_D(params, resolution=48, cutoff=1e-2)


@pytest.fixture(scope="session")
def domain(patch):
    return assemble_fundamental_domain(patch)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20260814)
