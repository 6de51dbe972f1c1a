"""The three coordinate differentials: algebraic identities, closed-form
boundary values, distinguished cycles, and the position map."""

import math

import numpy as np
import pytest

import g1helicoid.weierstrass as W
from g1helicoid.params import SurfaceParams, lambda_from_Lambda
from g1helicoid.period_solver import F_integral, G_integral
from g1helicoid.torus import SHEETS, build_chart, w_on_sheet

# Frozen reference values.
A0 = 0.4348562680146608        # height of the upper slit-curve endpoint
X1_TIP = -0.5536234052449172   # first coordinate of the slit-curve tip

P = SurfaceParams.create(0.5, 0.61)


def _left_points(seed, n=100):
    rng = np.random.default_rng(seed)
    m = rng.uniform(0.1, 2.5, n)
    th = rng.uniform(math.pi / 2 + 0.05, 3 * math.pi / 2 - 0.05, n)
    return m * np.exp(1j * th)


# ---------------------------------------------------------------------------
# pointwise identities
# ---------------------------------------------------------------------------


def test_conformality_all_sheets():
    z_left = _left_points(1)
    for sheet in SHEETS:
        z = z_left if sheet in ("upper_left", "lower_right") else -np.conj(z_left)
        f = W.phi_dz(P, sheet, z)
        res = W.conformality_residual(P, sheet, z)
        scale = 1.0 + np.abs(f).max(axis=-1) ** 2
        assert np.max(np.abs(res) / scale) < 1e-12


def test_gauss_map_factorization():
    # phi1 = (1/g - g) phi3 / 2 and phi2 = i (1/g + g) phi3 / 2
    z_left = _left_points(2)
    for sheet in SHEETS:
        z = z_left if sheet in ("upper_left", "lower_right") else -np.conj(z_left)
        f = W.phi_dz(P, sheet, z)
        g = W.gauss_map(P, sheet, z)
        f3 = f[..., 2]
        id1 = np.abs(f[..., 0] - 0.5 * (1.0 / g - g) * f3) / (1.0 + np.abs(f[..., 0]))
        id2 = np.abs(f[..., 1] - 0.5j * (1.0 / g + g) * f3) / (1.0 + np.abs(f[..., 1]))
        assert np.max(id1) < 1e-12
        assert np.max(id2) < 1e-12


def test_gauss_map_vertical_points():
    chart = build_chart(P)
    mp = {q.name: q for q in chart.marked_points()}
    for name, expect_zero in [
        ("vertical_normal_left", True),
        ("end_left", True),
        ("vertical_normal_right", False),
        ("end_right", False),
    ]:
        q = mp[name]
        g = W.gauss_map(P, q.sheet, q.z * (1 + 1e-8), q.region)
        if expect_zero:
            assert abs(g) < 1e-3, name
        else:
            assert abs(g) > 1e3, name


def test_gauss_map_formula_moebius():
    w = np.array([0.3 + 0.1j, -1.2j, 2.0])
    a = 0.7 * np.exp(0.25j * math.pi)
    g = W.gauss_map_formula(w, 0.7)
    assert np.max(np.abs(g - (w - a) / (w + a))) < 1e-15


def test_edge_rates_signs():
    t = np.linspace(0.05, 3.0, 50)
    assert np.all(W.x2_rate_edge(P, t) < 0.0)
    tv = np.linspace(0.05, 0.95, 30)
    assert np.all(W.x3_rate_vertical(P, tv) > 0.0)


def test_slit_rate_sign_and_closed_form():
    phis = np.linspace(-math.pi / 2, P.rho, 202)[1:-1]
    rate = W.dh_rate_on_slit_inner(P, phis)
    assert np.all(rate < 0.0)
    c = np.sqrt(np.cos(P.rho) / (np.sin(P.rho) - np.sin(phis)))
    cf = -(c / 2) * (1 - P.lam**2) * np.cos(phis) / (P.Lambda - 2 * np.sin(phis))
    assert np.max(np.abs(rate - cf)) < 1e-12


def test_slit_rate_flips_on_diagnostic_branch():
    d = SurfaceParams.diagnostic_branch(0.5, 1.5)
    phis = np.linspace(-math.pi / 2, d.rho, 202)[1:-1]
    assert np.all(W.dh_rate_on_slit_inner(d, phis) > 0.0)


# ---------------------------------------------------------------------------
# closed-form boundary anchors
# ---------------------------------------------------------------------------


def test_axis_rise_frozen(params):
    assert W.axis_rise(params) == pytest.approx(A0, abs=1e-12)


def test_height_split_identity(params):
    # inner edge height + outer tail = half the vertical period
    half = W.x3_E(params, 1.0) + W.x3_E_tail(params, 1.0)
    assert half == pytest.approx(params.T / 2, rel=1e-12)


def test_Ehat_anchor(params):
    assert W.x3_Ehat(params, 1.0) == pytest.approx(-W.axis_rise(params), abs=1e-12)


def test_x3_E_monotone(params):
    # the rate blows up like 1/sqrt(t) at the node, so x3_E(m) ~ sqrt(m) -> 0
    assert W.x3_E(params, 1e-6) < 2e-3
    assert W.x3_E(params, 1e-8) < 0.2 * W.x3_E(params, 1e-6)
    vals = np.array([W.x3_E(params, mm) for mm in np.linspace(0.01, 1.0, 50)])
    assert np.all(np.diff(vals) > 0.0)


@pytest.mark.parametrize("m", [0.35, 0.9, 1.3])
def test_x2_H1_matches_path_integral(params, m):
    seg = W.seg_edge_up_from_zero("upper_left", m)
    val = W.integrate_segment(params, seg)
    assert abs(val[0].real) < 1e-12  # x1 does not move along the edge
    assert abs(val[2].real) < 1e-12  # neither does x3
    assert -val[1].real == pytest.approx(W.x2_H1(params, m), abs=1e-11)


@pytest.mark.parametrize("m", [2.5, 5.0])
def test_x2_H2_matches_path_integral(params, m):
    seg = W.seg_edge_up_from_infinity("upper_left", m)
    val = W.integrate_segment(params, seg)
    assert val[1].real == pytest.approx(W.x2_H2(params, m), abs=1e-11)


def test_H_rays_monotone(params):
    m1 = np.linspace(0.05, 1.0 / params.lam - 0.05, 30)
    v1 = np.array([W.x2_H1(params, mm) for mm in m1])
    assert np.all(v1 > 0.0)  # unsigned progress out the negative x2-axis
    assert np.all(np.diff(v1) > 0.0)
    m2 = np.geomspace(1.0 / params.lam + 0.05, 50.0, 30)
    v2 = np.array([W.x2_H2(params, mm) for mm in m2])
    assert np.all(np.diff(v2) < 0.0)  # decays back toward the axis
    assert np.all(v2 > 0.0)


# ---------------------------------------------------------------------------
# distinguished cycles and period residuals
# ---------------------------------------------------------------------------


def test_alpha_cycle_is_vertical_period(params):
    alpha = W.alpha_cycle(params, n=512)
    T = params.T
    assert abs(alpha[0]) < 1e-6 * T
    assert abs(alpha[1]) < 1e-6 * T
    assert alpha[2] == pytest.approx(T, rel=1e-6)


def test_descent_axis(params):
    dax = W.descent_axis(params)
    assert abs(dax[0]) < 1e-9
    assert abs(dax[1]) < 1e-9
    assert dax[2] == pytest.approx(-params.T / 2, rel=1e-9)


def test_vertical_period_gap_closes_at_solution(params):
    gap = W.vertical_period_gap(params)
    assert np.max(np.abs(gap)) < 1e-6 * params.T


def test_vertical_period_gap_open_off_solution():
    gap = W.vertical_period_gap(P)  # generic (rho, lam), not the solution
    assert np.max(np.abs(gap)) > 1e-3 * P.T


@pytest.mark.parametrize(
    "rho,Lam",
    [(0.5, 3.0), (0.3, 2.6), (0.9, 2.2), (1.1, 2.05), (0.7, 4.0)],
)
def test_period_residual_ratios(rho, Lam):
    lam = lambda_from_Lambda(Lam)
    pp = SurfaceParams.create(rho, lam)
    Fv = F_integral(rho, Lam).value
    Gv = G_integral(rho, Lam).value
    kI = lam * math.sqrt(math.cos(rho)) / 2.0
    kII = lam * math.sqrt(math.cos(rho))
    assert W.period_residual_I(pp) == pytest.approx(kI * Fv, rel=1e-5)
    assert W.period_residual_II(pp) == pytest.approx(kII * Gv, rel=1e-5)


# ---------------------------------------------------------------------------
# the position map
# ---------------------------------------------------------------------------


def test_pullback_symmetries(params):
    rng = np.random.default_rng(5)
    scale = params.T
    ms = np.concatenate(
        [rng.uniform(0.05, 0.9, 3), rng.uniform(1.1, 1.0 / params.lam - 0.1, 3)]
    )
    ths = rng.uniform(math.pi / 2 + 0.1, 3 * math.pi / 2 - 0.1, 3)
    for m in ms:
        for th in ths:
            z = m * np.exp(1j * th)
            X = W.x_point(params, "upper_left", z)
            Xa = W.x_point(params, "lower_left", -np.conj(z))
            Xb = W.x_point(params, "upper_right", -np.conj(z))
            Xc = W.x_point(params, "lower_right", z)
            assert np.max(np.abs(Xa - X * [-1, 1, -1])) < 1e-8 * scale
            assert np.max(np.abs(Xb - X * [-1, -1, 1])) < 1e-8 * scale
            assert np.max(np.abs(Xc - X * [1, -1, -1])) < 1e-8 * scale


def test_route_independence(params):
    scale = params.T
    for m, th in [(0.3, 2.0), (0.7, 4.0)]:
        z = m * np.exp(1j * th)
        d = np.abs(
            W.x_point(params, "upper_left", z)
            - W.x_point(params, "upper_left", z, "vertical_inner")
        )
        assert np.max(d) < 1e-8 * scale
    z = 1.4 * np.exp(1j * 2.2)
    d = np.abs(
        W.x_point(params, "upper_left", z)
        - W.x_point(params, "upper_left", z, "vertical_outer")
    )
    assert np.max(d) < 1e-8 * scale


def test_tip_position(params):
    tip_r = W.tip_position(params, "ring")
    tip_s = W.tip_position(params, "slit")
    assert np.max(np.abs(tip_r - tip_s)) < 1e-9
    assert abs(tip_r[1]) < 1e-9
    assert abs(tip_r[2]) < 1e-9
    assert tip_r[0] == pytest.approx(X1_TIP, abs=1e-10)


def test_height_scale_covariance(params):
    z = 0.62 * np.exp(1j * 2.3)
    X1 = W.x_point(params, "upper_left", z)
    X3 = W.x_point(params, "upper_left", z, dh_scale=3.0)
    assert np.max(np.abs(X3 - 3.0 * X1)) < 1e-9


def test_positions_along_edge(params):
    # walking the bottom edge reproduces the closed form at every break
    s = np.linspace(0.0, 1.0, 9)
    seg = W.seg_edge_up("upper_left", 0.2, 0.9)
    pos = W.positions_along(params, seg, s, np.zeros(3))
    t = 0.2 + 0.7 * s
    progress = np.array([W.x2_H1(params, tt) for tt in t])
    expect = -(progress - progress[0])  # the edge walks out the negative x2-axis
    assert np.max(np.abs(pos[:, 1] - expect)) < 1e-10
    assert np.max(np.abs(pos[:, [0, 2]])) < 1e-11


def test_integrate_path_additivity(params):
    whole = W.integrate_segment(params, W.seg_edge_up("upper_left", 0.2, 0.9))
    parts = W.integrate_path(
        params,
        [
            W.seg_edge_up("upper_left", 0.2, 0.5),
            W.seg_edge_up("upper_left", 0.5, 0.9),
        ],
    )
    assert np.max(np.abs(whole - parts)) < 1e-12


def test_reversed_segment(params):
    fwd = W.integrate_segment(params, W.seg_edge_up("upper_left", 0.2, 0.9))
    rev = W.integrate_segment(
        params, W.reversed_segment(W.seg_edge_up("upper_left", 0.2, 0.9))
    )
    assert np.max(np.abs(fwd + rev)) < 1e-12
