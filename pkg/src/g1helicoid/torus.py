"""Domain geometry: rhombic torus, algebraic curve (z, w), chart, symmetries.

The immersion domain is a rhombic torus minus two punctures.  It is realized
as the genus-one algebraic curve

    w^2 = 2 cos(rho) * z / ((e^{i rho} - z) (z + e^{-i rho}))

which double-covers the z-sphere, branched over {0, oo, e^{i rho},
-e^{-i rho}}.  Equivalently ``(2 cos rho) / w^2 = -(z - 1/z - 2 i sin rho)``.

A flat chart ``u = xi e^{i pi/4} + eta e^{-i pi/4}`` identifies the torus with
the plane modulo the lattice generated by ``(2*width, 0)`` and
``(width, height)``; the chart coordinate satisfies ``du = (w/2) dz / z``.
Four closed rectangles tile the fundamental domain
``[-width, width] x [-height/2, height/2]``:

    upper_left  = [-width, 0] x [0,  height/2]   z in the closed LEFT half-plane
    upper_right = [0, width]  x [0,  height/2]   z in the closed RIGHT half-plane
    lower_right = [0, width]  x [-height/2, 0]   z in the closed LEFT half-plane
    lower_left  = [-width, 0] x [-height/2, 0]   z in the closed RIGHT half-plane

On ``upper_left`` angles are lifted to ``theta in [pi/2, 3pi/2]`` and w has
the single-valued closed form of :func:`w_branch_left`; the unit-circle arc
``theta in (pi - rho, 3pi/2]`` is a slit whose two banks are the two halves
of the rectangle's top chart edge (inner bank ``|z| -> 1-``, outer bank
``|z| -> 1+``), while the complementary arc ``theta in (pi/2, pi - rho)`` is
interior (w continuous across it).  The other three rectangles carry w by the
transport rules of :func:`w_on_sheet`.

Chart edges of ``upper_left`` (t, tt > 0):

    bottom  (eta = 0):        z = i t,    at (-xi_of_t(t), 0);   w = -tau_h e^{i pi/4}
    right   (xi = 0):         z = -i tt,  at (0, eta_of_tv(tt)), tt <= 1;
                                                                 w = +tau_v e^{-i pi/4}
    left    (xi = -width):    z = -i tt,  at (-width, eta_of_tv(1/tt)), tt >= 1;
                                                                 w = -tau_v e^{-i pi/4}
    top     (eta = height/2): z = e^{i theta}, the slit banks;
                              inner bank  w = +slit_modulus e^{-i pi/4},
                              outer bank  w = -slit_modulus e^{-i pi/4}

The two punctures sit on the bottom edges at z = i/lam (one on the
``upper_left``/``lower_left`` shared edge, one on the mirror edge).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np

from .params import SurfaceParams

__all__ = [
    "SHEETS",
    "SheetDomainError",
    "curve_rhs",
    "master_relation_residual",
    "lift_angle_left",
    "w_branch_left",
    "w_on_sheet",
    "du_dz",
    "slit_tip_angle",
    "tau_horizontal",
    "tau_vertical",
    "ring_modulus",
    "slit_modulus",
    "mobius_flip_z",
    "SymmetryAction",
    "SYMMETRIES",
    "apply_symmetry",
    "chart_action",
    "MarkedPoint",
    "TorusChart",
    "build_chart",
    "chart_width",
    "chart_height",
]

SHEETS = ("upper_left", "upper_right", "lower_right", "lower_left")

# Sheets whose z-image is the closed left half-plane; the other two live on
# the closed right half-plane and transport through z -> -conj(z).
_LEFT_SHEETS = frozenset({"upper_left", "lower_right"})
_RIGHT_SHEETS = frozenset({"upper_right", "lower_left"})

_HALF_PLANE_SLACK = 1e-9
_REGION_SLACK = 1e-6


class SheetDomainError(ValueError):
    """A z value was passed to a sheet whose half-plane does not contain it."""


# ----------------------------------------------------------------------
# The algebraic curve
# ----------------------------------------------------------------------

def curve_rhs(params: SurfaceParams, z):
    """Right-hand side of the curve equation, i.e. the value of w^2 at z."""
    z = np.asarray(z, dtype=complex)
    ea = np.exp(1j * params.rho)
    eb = np.exp(-1j * params.rho)
    return 2.0 * math.cos(params.rho) * z / ((ea - z) * (z + eb))


def master_relation_residual(params: SurfaceParams, z, w):
    """Residual of ``(2 cos rho)/w^2 + (z - 1/z - 2 i sin rho)`` (zero on curve)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return 2.0 * math.cos(params.rho) / (w * w) + (z - 1.0 / z - 2j * math.sin(params.rho))


def lift_angle_left(z) -> np.ndarray:
    """Angle of z lifted to [pi/2, 3pi/2] on the closed left half-plane."""
    z = np.asarray(z, dtype=complex)
    m = np.abs(z)
    if np.any(z.real > _HALF_PLANE_SLACK * (1.0 + m)):
        bad = z.flat[int(np.argmax(z.real - _HALF_PLANE_SLACK * (1.0 + m)))]
        raise SheetDomainError(f"z={bad!r} is not in the closed left half-plane")
    th = np.arctan2(z.imag, z.real)
    return np.where(th < 0.0, th + 2.0 * math.pi, th)


def w_branch_left(params: SurfaceParams, z, region: str = "auto"):
    """Single-valued w on the left-half-plane sheet ``upper_left``.

    ``region`` selects the closed form: ``"inner"`` (valid for |z| <= 1),
    ``"outer"`` (valid for |z| >= 1) or ``"auto"`` (pick by |z|; points with
    |z| = 1 use the inner form).  On the interior gluing arc
    ``theta in (pi/2, pi - rho)`` the two forms agree; on the slit arc they
    give the two bank values (the inner form the inner bank).  Both forms
    keep their square-root arguments off the principal branch cut everywhere
    in their stated regions, the only exception being the common pole at the
    slit tip ``z = -e^{-i rho}``.
    """
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    m = np.abs(z)
    th = lift_angle_left(z)

    if region == "auto":
        inner_mask = m <= 1.0
    elif region == "inner":
        if np.any(m > 1.0 + _REGION_SLACK):
            raise SheetDomainError("region='inner' requires |z| <= 1")
        inner_mask = np.ones(z.shape, dtype=bool)
    elif region == "outer":
        if np.any(m < 1.0 - _REGION_SLACK):
            raise SheetDomainError("region='outer' requires |z| >= 1")
        inner_mask = np.zeros(z.shape, dtype=bool)
    else:
        raise ValueError(f"region must be 'auto', 'inner' or 'outer', got {region!r}")

    rho = params.rho
    pref = -math.sqrt(2.0 * math.cos(rho))
    ea = complex(np.exp(1j * rho))
    eb = complex(np.exp(-1j * rho))

    w = np.empty(z.shape, dtype=complex)
    i = inner_mask
    if np.any(i):
        zi = z[i]
        w[i] = (
            pref * np.sqrt(m[i]) * np.exp(0.5j * th[i])
            / (np.sqrt(ea - zi) * np.sqrt(zi + eb))
        )
    o = ~inner_mask
    if np.any(o):
        zo = z[o]
        w[o] = pref / (np.sqrt(ea - zo) * np.sqrt(1.0 + eb / zo))
    return w[0] if scalar else w


def w_on_sheet(params: SurfaceParams, sheet: str, z, region: str = "auto"):
    """w at the point of ``sheet`` over z.

    Left-half-plane sheets take z with Re z <= 0, right-half-plane sheets
    Re z >= 0.  The transport rules (relative to the base branch ``wL`` of
    :func:`w_branch_left`) are

        upper_left :  w =  wL(z)
        lower_right:  w = -wL(z)
        upper_right:  w = -i conj(wL(-conj(z)))
        lower_left :  w = +i conj(wL(-conj(z)))

    which make w continuous across every shared chart edge and compatible
    with the symmetry actions of :data:`SYMMETRIES`.
    """
    if sheet in _LEFT_SHEETS:
        base = w_branch_left(params, z, region)
        return base if sheet == "upper_left" else -base
    if sheet in _RIGHT_SHEETS:
        zr = -np.conj(np.asarray(z, dtype=complex))
        base = np.conj(w_branch_left(params, zr, region))
        return -1j * base if sheet == "upper_right" else 1j * base
    raise ValueError(f"unknown sheet {sheet!r}; expected one of {SHEETS}")


def du_dz(z, w):
    """Chart differential du/dz = w / (2 z) at a curve point (z, w)."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    return w / (2.0 * z)


def slit_tip_angle(params: SurfaceParams) -> float:
    """Lifted angle of the slit tip (= the left w-pole), pi - rho."""
    return math.pi - params.rho


# ----------------------------------------------------------------------
# Closed forms for |w| along the distinguished curves
# ----------------------------------------------------------------------

def tau_horizontal(params: SurfaceParams, t):
    """|w| on the bottom chart edges, z = i t with t > 0."""
    t = np.asarray(t, dtype=float)
    return np.sqrt(2.0 * math.cos(params.rho) / (t + 1.0 / t - 2.0 * math.sin(params.rho)))


def tau_vertical(params: SurfaceParams, t):
    """|w| on the vertical chart edges, z = -i t with t > 0."""
    t = np.asarray(t, dtype=float)
    return np.sqrt(2.0 * math.cos(params.rho) / (t + 1.0 / t + 2.0 * math.sin(params.rho)))


def ring_modulus(params: SurfaceParams, theta):
    """|w| on the interior unit-circle arcs, z = e^{i theta}, sin theta > sin rho.

    Covers both the left-sheet gluing arc (theta in (pi/2, pi - rho)) and its
    right-sheet mirror (theta in (rho, pi/2)).
    """
    theta = np.asarray(theta, dtype=float)
    return np.sqrt(math.cos(params.rho) / (np.sin(theta) - math.sin(params.rho)))


def slit_modulus(params: SurfaceParams, phi):
    """|w| on the slit banks, z = -e^{-i phi} with phi in (-pi/2, rho)."""
    phi = np.asarray(phi, dtype=float)
    return np.sqrt(math.cos(params.rho) / (math.sin(params.rho) - np.sin(phi)))


# ----------------------------------------------------------------------
# Symmetries
# ----------------------------------------------------------------------

def mobius_flip_z(params: SurfaceParams, z):
    """The Moebius involution z -> (1 - e^{-i rho} z) / (z + e^{-i rho})."""
    z = np.asarray(z, dtype=complex)
    eb = complex(np.exp(-1j * params.rho))
    return (1.0 - eb * z) / (z + eb)


@dataclass(frozen=True)
class SymmetryAction:
    """One torus symmetry: chart map, curve action, and space behaviour.

    ``orientation`` is +1 for holomorphic actions and -1 for antiholomorphic
    ones.  ``space_matrix`` is the linear part of the induced ambient motion
    where that is pinned down (the three coordinate-axis half-turns); None
    otherwise.
    """

    name: str
    orientation: int
    z_map: Callable[[SurfaceParams, np.ndarray], np.ndarray]
    w_map: Callable[[SurfaceParams, np.ndarray], np.ndarray]
    chart_map: Callable[[float, float, float, float], Tuple[float, float]]
    space_matrix: Optional[np.ndarray]


def _mat(d1: int, d2: int, d3: int) -> np.ndarray:
    return np.diag(np.array([d1, d2, d3], dtype=float))


SYMMETRIES: Dict[str, SymmetryAction] = {
    # 180-degree rotation about the x1-axis: chart rotation about the origin,
    # the deck transformation of the z-projection.
    "half_turn_x1": SymmetryAction(
        "half_turn_x1", +1,
        lambda p, z: np.asarray(z, dtype=complex),
        lambda p, w: -np.asarray(w, dtype=complex),
        lambda W, H, xi, eta: (-xi, -eta),
        _mat(1, -1, -1),
    ),
    # 180-degree rotation about the x2-axis.
    "half_turn_x2": SymmetryAction(
        "half_turn_x2", -1,
        lambda p, z: -np.conj(np.asarray(z, dtype=complex)),
        lambda p, w: 1j * np.conj(np.asarray(w, dtype=complex)),
        lambda W, H, xi, eta: (xi, -eta),
        _mat(-1, 1, -1),
    ),
    # 180-degree rotation about the x3-axis.
    "half_turn_x3": SymmetryAction(
        "half_turn_x3", -1,
        lambda p, z: -np.conj(np.asarray(z, dtype=complex)),
        lambda p, w: -1j * np.conj(np.asarray(w, dtype=complex)),
        lambda W, H, xi, eta: (-xi, eta),
        _mat(-1, -1, 1),
    ),
    # Deck transformation of the w-projection; fixes the four w-branch points.
    "deck_w": SymmetryAction(
        "deck_w", +1,
        lambda p, z: -1.0 / np.asarray(z, dtype=complex),
        lambda p, w: np.asarray(w, dtype=complex),
        lambda W, H, xi, eta: (-xi, H - eta),
        None,
    ),
    # Antiholomorphic reflection through the unit z-circle; fixes the top
    # chart line eta = height/2.
    "unit_circle_reflection": SymmetryAction(
        "unit_circle_reflection", -1,
        lambda p, z: 1.0 / np.conj(np.asarray(z, dtype=complex)),
        lambda p, w: -1j * np.conj(np.asarray(w, dtype=complex)),
        lambda W, H, xi, eta: (xi, H - eta),
        None,
    ),
    # Holomorphic point reflection of the chart about q = (-W/4, 3H/4); its
    # z-action is the Moebius involution of :func:`mobius_flip_z` and its
    # four fixed points are the points with w = +/-1.
    "mobius_flip": SymmetryAction(
        "mobius_flip", +1,
        mobius_flip_z,
        lambda p, w: 1.0 / np.asarray(w, dtype=complex),
        lambda W, H, xi, eta: (-W / 2.0 - xi, 3.0 * H / 2.0 - eta),
        None,
    ),
    # The same point reflection composed with the half-lattice translation.
    "mobius_flip_shifted": SymmetryAction(
        "mobius_flip_shifted", +1,
        lambda p, z: -1.0 / mobius_flip_z(p, z),
        lambda p, w: -1.0 / np.asarray(w, dtype=complex),
        lambda W, H, xi, eta: (W / 2.0 - xi, 3.0 * H / 2.0 - eta),
        None,
    ),
    # Translation by the half-lattice class (width, 0) == (0, height).
    "half_lattice_translation": SymmetryAction(
        "half_lattice_translation", +1,
        lambda p, z: -1.0 / np.asarray(z, dtype=complex),
        lambda p, w: -np.asarray(w, dtype=complex),
        lambda W, H, xi, eta: (xi + W, eta),
        None,
    ),
}


def apply_symmetry(params: SurfaceParams, name: str, z, w=None):
    """Apply a symmetry to a curve point: returns (z', w') (w' None if w is)."""
    try:
        act = SYMMETRIES[name]
    except KeyError:
        raise ValueError(f"unknown symmetry {name!r}; have {sorted(SYMMETRIES)}") from None
    z2 = act.z_map(params, z)
    w2 = None if w is None else act.w_map(params, w)
    return z2, w2


def chart_action(chart: "TorusChart", name: str, xi: float, eta: float) -> Tuple[float, float]:
    """Apply a symmetry's chart map (result is NOT lattice-reduced)."""
    try:
        act = SYMMETRIES[name]
    except KeyError:
        raise ValueError(f"unknown symmetry {name!r}; have {sorted(SYMMETRIES)}") from None
    return act.chart_map(chart.width, chart.height, xi, eta)


# ----------------------------------------------------------------------
# Chart lengths and edge parameterizations
# ----------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(8)


def _edge_density(params: SurfaceParams, vertical: bool) -> Callable[[np.ndarray], np.ndarray]:
    """Chart speed d(xi)/ds along an edge, with t = s^2 (quartic form)."""
    sgn = 1.0 if vertical else -1.0
    two_sin = 2.0 * math.sin(params.rho) * sgn
    pref = math.sqrt(2.0 * math.cos(params.rho))

    def f(s: np.ndarray) -> np.ndarray:
        s2 = s * s
        return pref / np.sqrt(1.0 + two_sin * s2 + s2 * s2)

    return f


def _gl_cumulative(f: Callable, n_intervals: int) -> Tuple[np.ndarray, np.ndarray]:
    """Cumulative integral of f over [0, 1] at n_intervals+1 uniform edges."""
    edges = np.linspace(0.0, 1.0, n_intervals + 1)
    a = edges[:-1]
    h = edges[1] - edges[0]
    x = a[:, None] + 0.5 * h * (_GL_NODES[None, :] + 1.0)
    vals = f(x)
    per_interval = 0.5 * h * vals @ _GL_WEIGHTS
    cum = np.concatenate(([0.0], np.cumsum(per_interval)))
    return edges, cum


def chart_width(params: SurfaceParams, n_intervals: int = 512) -> float:
    """Horizontal chart dimension: the lattice is (2*width, 0), (width, height)."""
    _, cum = _gl_cumulative(_edge_density(params, vertical=False), n_intervals)
    return 2.0 * float(cum[-1])


def chart_height(params: SurfaceParams, n_intervals: int = 512) -> float:
    """Vertical chart dimension (rhombus side pairing (width, height))."""
    _, cum = _gl_cumulative(_edge_density(params, vertical=True), n_intervals)
    return 2.0 * float(cum[-1])


@dataclass(frozen=True)
class MarkedPoint:
    """A distinguished torus point with its chart position and curve data.

    ``z``/``w`` are None where the value is the point at infinity.  ``region``
    disambiguates |z| = 1 points ("inner"/"outer" bank) and is None elsewhere.
    """

    name: str
    sheet: str
    chart: Tuple[float, float]
    z: Optional[complex]
    w: Optional[complex]
    region: Optional[str] = None


@dataclass(frozen=True)
class TorusChart:
    """Precomputed chart geometry for one parameter set.

    ``width``/``height`` are the fundamental dimensions; the edge tables give
    machine-accurate xi(t) on the bottom edges and eta(t) on the vertical
    edges together with their inverses.
    """

    params: SurfaceParams
    width: float
    height: float
    _s_grid: np.ndarray
    _xi_grid: np.ndarray
    _eta_grid: np.ndarray

    # -- horizontal edge: z = i t at chart (+/- xi_of_t(t), 0) --------

    def _xi_of_s(self, s: np.ndarray) -> np.ndarray:
        f = _edge_density(self.params, vertical=False)
        return self._table_eval(self._xi_grid, f, s)

    def _eta_of_s(self, s: np.ndarray) -> np.ndarray:
        f = _edge_density(self.params, vertical=True)
        return self._table_eval(self._eta_grid, f, s)

    def _table_eval(self, grid: np.ndarray, f: Callable, s: np.ndarray) -> np.ndarray:
        s = np.asarray(s, dtype=float)
        n = len(self._s_grid) - 1
        idx = np.clip(
            np.searchsorted(self._s_grid, s, side="right") - 1, 0, n - 1
        )
        a = self._s_grid[idx]
        h = s - a
        x = a[..., None] + 0.5 * h[..., None] * (_GL_NODES + 1.0)
        partial = 0.5 * h * (f(x) @ _GL_WEIGHTS)
        return grid[idx] + partial

    def xi_of_t(self, t):
        """Unsigned chart offset of z = i t on the bottom edge (t > 0)."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t).copy()
        if np.any(t <= 0.0) or np.any(~np.isfinite(t)):
            raise ValueError("xi_of_t requires finite t > 0")
        out = np.empty_like(t)
        low = t <= 1.0
        if np.any(low):
            out[low] = self._xi_of_s(np.sqrt(t[low]))
        if np.any(~low):
            out[~low] = self.width - self._xi_of_s(np.sqrt(1.0 / t[~low]))
        return float(out[0]) if scalar else out

    def t_of_xi(self, xi):
        """Inverse of :meth:`xi_of_t` on (0, width)."""
        xi = np.asarray(xi, dtype=float)
        scalar = xi.ndim == 0
        xi = np.atleast_1d(xi).astype(float)
        if np.any(xi <= 0.0) or np.any(xi >= self.width):
            raise ValueError("t_of_xi requires 0 < xi < width")
        half = 0.5 * self.width
        flip = xi > half
        target = np.where(flip, self.width - xi, xi)
        f = _edge_density(self.params, vertical=False)
        s = np.interp(target, self._xi_grid, self._s_grid)
        for _ in range(4):
            s = s - (self._xi_of_s(s) - target) / f(s)
            s = np.clip(s, 0.0, 1.0)
        t = s * s
        t = np.where(flip, 1.0 / np.maximum(t, 1e-300), t)
        return float(t[0]) if scalar else t

    # -- vertical edges: z = -i t at (0, eta_of_tv(t)) for t <= 1 -----

    def eta_of_tv(self, t):
        """Chart height of z = -i t on the right vertical edge (0 < t <= 1);
        for t > 1 returns the height of z = -i t on the LEFT vertical edge,
        i.e. eta_of_tv(1/t)."""
        t = np.asarray(t, dtype=float)
        scalar = t.ndim == 0
        t = np.atleast_1d(t).copy()
        if np.any(t <= 0.0) or np.any(~np.isfinite(t)):
            raise ValueError("eta_of_tv requires finite t > 0")
        t = np.where(t > 1.0, 1.0 / t, t)
        out = self._eta_of_s(np.sqrt(t))
        return float(out[0]) if scalar else out

    def tv_of_eta(self, eta):
        """Inverse of :meth:`eta_of_tv` on (0, height/2] (the t <= 1 branch)."""
        eta = np.asarray(eta, dtype=float)
        scalar = eta.ndim == 0
        eta = np.atleast_1d(eta).astype(float)
        if np.any(eta <= 0.0) or np.any(eta > 0.5 * self.height * (1 + 1e-12)):
            raise ValueError("tv_of_eta requires 0 < eta <= height/2")
        f = _edge_density(self.params, vertical=True)
        s = np.interp(eta, self._eta_grid, self._s_grid)
        for _ in range(4):
            s = s - (self._eta_of_s(s) - eta) / f(s)
            s = np.clip(s, 0.0, 1.0)
        t = s * s
        return float(t[0]) if scalar else t

    def reduce(self, xi: float, eta: float) -> Tuple[float, float]:
        """Lattice-reduce a chart point into [-width, width) x [-height/2, height/2)."""
        k = math.floor(eta / self.height + 0.5)
        xi -= k * self.width
        eta -= k * self.height
        xi = (xi + self.width) % (2.0 * self.width) - self.width
        return xi, eta

    def marked_points(self) -> Tuple[MarkedPoint, ...]:
        """The distinguished points with exact chart positions and w values."""
        p = self.params
        W, H = self.width, self.height
        rho, lam, r, R = p.rho, p.lam, p.r, p.R
        e4 = complex(np.exp(0.25j * math.pi))
        em4 = complex(np.exp(-0.25j * math.pi))
        xi_end = self.xi_of_t(1.0 / lam)
        xi_vert = self.xi_of_t(lam)
        zeta_plus = complex(
            -np.exp(-1j * rho) + math.sqrt(2.0 * math.cos(rho)) * np.exp(-0.5j * rho)
        )
        zeta_minus = complex(
            -np.exp(-1j * rho) - math.sqrt(2.0 * math.cos(rho)) * np.exp(-0.5j * rho)
        )
        return (
            MarkedPoint("node_zero", "upper_left", (0.0, 0.0), 0.0 + 0.0j, 0.0 + 0.0j, "inner"),
            MarkedPoint("node_infinity", "upper_left", (-W, 0.0), None, 0.0 + 0.0j, "outer"),
            MarkedPoint("quarter_h_left", "upper_left", (-W / 2, 0.0), 1j, -R * e4, "inner"),
            MarkedPoint("quarter_h_right", "upper_right", (W / 2, 0.0), 1j, R * e4, "inner"),
            MarkedPoint("quarter_v_near", "upper_left", (0.0, H / 2), -1j, em4 / R, "inner"),
            MarkedPoint("quarter_v_far", "upper_left", (-W, H / 2), -1j, -em4 / R, "outer"),
            MarkedPoint("w_pole_left", "upper_left", (-W / 2, H / 2),
                        complex(-np.exp(-1j * rho)), None, None),
            MarkedPoint("w_pole_right", "upper_right", (W / 2, H / 2),
                        complex(np.exp(1j * rho)), None, None),
            MarkedPoint("end_left", "upper_left", (-xi_end, 0.0), 1j / lam, -r * e4, "outer"),
            MarkedPoint("end_right", "upper_right", (xi_end, 0.0), 1j / lam, r * e4, "outer"),
            MarkedPoint("vertical_normal_left", "upper_left", (-xi_vert, 0.0),
                        1j * lam, -r * e4, "inner"),
            MarkedPoint("vertical_normal_right", "upper_right", (xi_vert, 0.0),
                        1j * lam, r * e4, "inner"),
            MarkedPoint("w_unit_plus", "upper_right", (W / 4, H / 4), zeta_plus, 1.0 + 0.0j, "auto"),
            MarkedPoint("w_unit_minus", "upper_left", (-3 * W / 4, H / 4), zeta_minus, -1.0 + 0.0j, "auto"),
        )


def build_chart(params: SurfaceParams, n_table: int = 1024) -> TorusChart:
    """Build the chart geometry (edge tables at machine accuracy)."""
    s_grid, xi_grid = _gl_cumulative(_edge_density(params, vertical=False), n_table)
    _, eta_grid = _gl_cumulative(_edge_density(params, vertical=True), n_table)
    return TorusChart(
        params=params,
        width=2.0 * float(xi_grid[-1]),
        height=2.0 * float(eta_grid[-1]),
        _s_grid=s_grid,
        _xi_grid=xi_grid,
        _eta_grid=eta_grid,
    )
