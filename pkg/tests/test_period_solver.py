"""Period integrals and the nested two-parameter solve.

Reference values were frozen from a 50-digit computation made with an
independent integrator; a composite-Simpson oracle (after a square-root
substitution that removes the endpoint singularity) cross-checks the
production quadrature at generic points.
"""

import math

import numpy as np
import pytest

from g1helicoid.params import lambda_from_Lambda
from g1helicoid.period_solver import (
    F_integral,
    G_integral,
    G_integrand_samples,
    Lambda_upper_bound,
    NoSignChangeError,
    PeriodSolverError,
    Lambda_window_certificate,
    scan_H,
    solve_Lambda_of_rho,
    solve_period_problem,
)

# Frozen reference values (50-digit arithmetic, independent integrator).
F_05_30 = -0.5425754319840516
G_05_30 = 0.4193463545050792
F_02_NEAR2 = 2.5109360335057882  # F(0.2, 2 + 1e-6)
LAMBDA_OF_08 = 2.2238887720217576
RHO0 = 0.7105219800457504
LAMBDA0 = 0.5882995303657090
BIG_LAMBDA0 = 2.2881139078790866
SCAN_G_AT_15 = -3.8515672286288996  # G(1.5, Lambda(1.5))


# ---------------------------------------------------------------------------
# independent composite-Simpson oracle
# ---------------------------------------------------------------------------


def _simpson(h, n=4000):
    """Composite Simpson on [0, 1] for a smooth vectorized integrand."""
    u = np.linspace(0.0, 1.0, 2 * n + 1)
    y = h(u)
    return (y[0] + y[-1] + 4.0 * y[1::2].sum() + 2.0 * y[2:-1:2].sum()) / (6.0 * n)


def F_oracle(rho, Lam, n=4000):
    # p = rho + (pi/2 - rho) u^2 turns the 1/sqrt(sin p - sin rho) endpoint
    # singularity into a bounded analytic factor.
    delta = math.pi / 2 - rho

    def h(u):
        d = delta * u * u
        p = rho + d
        sing = 2.0 * np.cos(rho + 0.5 * d) * np.sin(0.5 * d)  # sin p - sin rho
        ratio = np.empty_like(u)
        nz = u > 0
        ratio[nz] = u[nz] / np.sqrt(sing[nz])
        ratio[~nz] = 1.0 / math.sqrt(delta * math.cos(rho))
        val = (2.0 - Lam * np.sin(p)) / (Lam - 2.0 * np.sin(p))
        return 2.0 * delta * val * ratio

    return _simpson(h, n)


def G_oracle(rho, Lam, n=4000):
    # p = rho - (rho + pi/2) u^2, same substitution from the singular end.
    delta = rho + math.pi / 2
    sr = math.sin(rho)

    def h(u):
        d = delta * u * u  # rho - p
        p = rho - d
        sing = 2.0 * np.cos(rho - 0.5 * d) * np.sin(0.5 * d)  # sin rho - sin p
        ratio = np.empty_like(u)
        nz = u > 0
        ratio[nz] = u[nz] / np.sqrt(sing[nz])
        ratio[~nz] = 1.0 / math.sqrt(delta * math.cos(rho))
        sp = np.sin(p)
        val = (Lam - 4.0 * sr + 2.0 * sp) * (2.0 - Lam * sp) / (Lam - 2.0 * sp) ** 2
        return 2.0 * delta * val * ratio

    return _simpson(h, n)


# ---------------------------------------------------------------------------
# frozen-value and oracle cross-checks
# ---------------------------------------------------------------------------


def test_F_frozen():
    res = F_integral(0.5, 3.0)
    assert res.converged
    assert abs(res.value - F_05_30) < 1e-12


def test_G_frozen():
    res = G_integral(0.5, 3.0)
    assert res.converged
    assert abs(res.value - G_05_30) < 1e-12


def test_F_near_lower_boundary_frozen():
    res = F_integral(0.2, 2.0 + 1e-6)
    assert abs(res.value - F_02_NEAR2) < 1e-10 * abs(F_02_NEAR2)


@pytest.mark.parametrize("rho,Lam", [(0.37, 2.9), (0.95, 2.11), (1.25, 2.03)])
def test_F_against_simpson_oracle(rho, Lam):
    assert F_integral(rho, Lam).value == pytest.approx(F_oracle(rho, Lam), abs=1e-9)


@pytest.mark.parametrize("rho,Lam", [(0.37, 2.9), (0.95, 2.11), (0.6, 2.4)])
def test_G_against_simpson_oracle(rho, Lam):
    assert G_integral(rho, Lam).value == pytest.approx(G_oracle(rho, Lam), abs=1e-9)


# ---------------------------------------------------------------------------
# structure of the inner problem F(rho, .) = 0
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("rho", [0.2, 0.7, 1.2])
def test_F_bracket_signs(rho):
    lo = 2.0 + 1e-6
    hi = 2.0 / math.sin(rho) - 1e-6
    assert F_integral(rho, lo).value > 0.0
    assert F_integral(rho, hi).value < 0.0


@pytest.mark.parametrize("rho", [0.2, 0.7, 1.2])
def test_F_strictly_decreasing_in_Lambda(rho):
    lams = np.linspace(2.0 + 1e-6, 2.0 / math.sin(rho) - 1e-6, 10)
    vals = [F_integral(rho, L).value for L in lams]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_solve_Lambda_frozen():
    Lam = solve_Lambda_of_rho(0.8)
    assert abs(Lam - LAMBDA_OF_08) < 1e-11
    assert abs(F_integral(0.8, Lam).value) < 1e-11


def test_Lambda_in_admissible_range():
    for rho in np.linspace(0.05, math.pi / 2 - 0.05, 9):
        Lam = solve_Lambda_of_rho(float(rho))
        assert 2.0 < Lam < Lambda_upper_bound(float(rho))


def test_scan_row_frozen():
    rows = scan_H([1.5])
    (rho, Lam, F, G) = rows[0]
    assert rho == 1.5
    assert abs(F) < 1e-10
    assert abs(G - SCAN_G_AT_15) < 1e-9 * abs(SCAN_G_AT_15)


def test_scan_threaded_matches_serial():
    grid = [0.3, 0.7, 1.1, 1.4]
    serial = scan_H(grid)
    threaded = scan_H(grid, threads=4)
    assert serial == threaded


# ---------------------------------------------------------------------------
# the outer solve
# ---------------------------------------------------------------------------


def test_solution_frozen(solution):
    assert abs(solution.rho0 - RHO0) < 1e-10
    assert abs(solution.lambda0 - LAMBDA0) < 1e-10
    assert abs(solution.Lambda0 - BIG_LAMBDA0) < 1e-10
    assert abs(solution.residual_F) < 1e-11
    assert abs(solution.residual_G) < 1e-11
    assert len(solution.sign_changes) >= 1
    lo, hi = solution.bracket_used
    assert lo < solution.rho0 < hi


def test_solution_consistency(solution):
    p = solution.params
    assert p.lam == pytest.approx(lambda_from_Lambda(solution.Lambda0), rel=1e-12)
    assert 0.0 < solution.rho0 < math.pi / 2
    assert 0.0 < solution.lambda0 < 1.0


def test_solve_raises_without_sign_change():
    # G(rho, Lambda(rho)) is single-signed on a grid far below rho0
    with pytest.raises((NoSignChangeError, PeriodSolverError)):
        solve_period_problem(grid_size=4, rho_min=0.05, rho_max=0.2)


# ---------------------------------------------------------------------------
# diagnostics outside the physical branch
# ---------------------------------------------------------------------------


def test_G_integrand_samples_shape_and_sign():
    vals = G_integrand_samples(-0.3, 2.5, n=200)
    assert vals.shape == (200,)
    assert np.all(vals > 0.0)


def test_Lambda_window_certificate_small_grid():
    rep = Lambda_window_certificate(rho_grid=[0.3, 0.9, 1.45, 1.5])
    assert rep.all_bounds_hold
    assert rep.tail_bound_constant < 0.0
    assert rep.large_Lambda_constant < 0.0
    assert rep.tail_bound_constant == pytest.approx(math.sqrt(2) / 3 - 0.5, rel=1e-15)
    for row in rep.rows:
        assert row["in_range"]
        assert row["F_at_8"] < 0.0
    near_top = [r for r in rep.rows if r["near_top_bound"] is not None]
    assert near_top, "grid includes rho > 1.4 so the sharp bound must be exercised"
    for row in near_top:
        assert row["near_top_bound"]["holds"]
