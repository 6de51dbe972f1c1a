"""Surface form components and path integration on the curve.

The immersion is ``X = Re integral Phi`` with ``Phi = (phi1, phi2, phi3)``,

    phi3 = dh = e^{i pi/4} (z - i lam)/(z - i/lam) * du,   du = (w/2) dz / z
    phi1 = (1/2) (1/g - g) dh
    phi2 = (i/2) (1/g + g) dh
    g    = (w - a) / (w + a),        a = r e^{i pi/4}

Substituting the curve equation removes every spurious cancellation and puts
the three components into pole-factored closed forms (P = z - i/lam):

    phi1/dz = -(2 cos rho / r) / P^2
    phi2/dz = -i e^{i pi/4} Q(z) w / (2 z P^2),   Q(z) = z^2 + i(Lam - 4 sin rho) z - 1
    phi3/dz =    e^{i pi/4} (z - i lam) w / (2 z P)

The sign of a (equivalently of phi1) is the one orientation choice not fixed
by the w-branch seed; it is pinned here by the geometric invariants: the
fundamental patch must project into the half-space x1 <= 0 (its boundary
curve c bulges to negative x1) while the other components keep the verified
slab range x3 in [-T/2, a] and the residual-to-integral sign conventions.
This corresponds to a = -r e^{i pi/4} in g = (w - a)/(w + a); the anchor
value g(node) = -1 at w = 0 holds for either sign.

These satisfy ``phi1^2 + phi2^2 + phi3^2 = 0`` identically on the curve, and
``phi1`` depends on z alone (it is even under the z-deck involution).  The
only singularities are the double pole at the punctures ``z = i/lam``, the
inverse-square-root at ``z = 0``/``z = oo`` and at the w-poles; every path
constructor below bakes in a substitution that makes its integrand smooth, so
plain Gauss-Legendre panels converge at spectral rate.

Paths are oriented lists of :class:`Segment`; each segment maps ``s in [0,1]``
to a z-path on one sheet.  :func:`integrate_path` returns the (complex)
integral of all three components; positions are ``Re`` of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .params import SurfaceParams
from .quadrature import QuadratureSpec, integrate
from .torus import lift_angle_left, w_on_sheet

__all__ = [
    "IntegrationError",
    "phi_dz",
    "gauss_map",
    "gauss_map_formula",
    "conformality_residual",
    "Segment",
    "seg_edge_up_from_zero",
    "seg_edge_up_from_infinity",
    "seg_edge_up",
    "seg_edge_down_from_zero",
    "seg_edge_down_from_infinity",
    "seg_edge_down",
    "seg_arc",
    "seg_ring_left_to_tip",
    "seg_ring_left_from_tip",
    "seg_slit_bank",
    "seg_mirror_ring_right",
    "reversed_segment",
    "integrate_segment",
    "integrate_path",
    "positions_along",
    "alpha_cycle",
    "descent_axis",
    "vertical_period_gap",
    "period_residual_I",
    "period_residual_II",
    "dh_rate_on_slit_inner",
    "x_point",
    "x2_rate_edge",
    "x3_rate_vertical",
    "x2_H1",
    "x2_H2",
    "x3_E",
    "x3_E_tail",
    "axis_rise",
    "x3_Ehat",
    "tip_position",
]

_E4 = complex(np.exp(0.25j * math.pi))

_ANCHOR_SPEC = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14, max_level=12)


class IntegrationError(RuntimeError):
    """A path integral failed to converge or hit a non-finite integrand."""


# ----------------------------------------------------------------------
# Form components
# ----------------------------------------------------------------------

def phi_dz(
    params: SurfaceParams,
    sheet: str,
    z,
    region: str = "auto",
    dh_scale: float = 1.0,
) -> np.ndarray:
    """The three components (phi1, phi2, phi3) per dz; shape ``z.shape + (3,)``.

    ``dh_scale`` rescales the height differential (and with it the whole
    immersion), which is useful to test scale covariance.
    """
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    w = np.atleast_1d(w_on_sheet(params, sheet, z, region))
    lam = params.lam
    pole = z - 1j / lam
    q = z * z + 1j * (params.Lambda - 4.0 * math.sin(params.rho)) * z - 1.0
    out = np.empty(z.shape + (3,), dtype=complex)
    out[..., 0] = -(2.0 * math.cos(params.rho) / params.r) / (pole * pole)
    out[..., 1] = -1j * _E4 * q * w / (2.0 * z * pole * pole)
    out[..., 2] = _E4 * (z - 1j * lam) * w / (2.0 * z * pole)
    if dh_scale != 1.0:
        out *= dh_scale
    return out


def gauss_map_formula(w, r: float):
    """The bare Moebius form g = (w - r e^{i pi/4})/(w + r e^{i pi/4}).

    Pass a signed ``r`` to select the orientation; the immersion uses -r
    (see the module docstring).
    """
    a = r * _E4
    return (np.asarray(w, dtype=complex) - a) / (np.asarray(w, dtype=complex) + a)


def gauss_map(params: SurfaceParams, sheet: str, z, region: str = "auto"):
    """Stereographic Gauss map of the immersion at the points of ``sheet``
    over z.  Uses a = -r e^{i pi/4} so the patch projects into x1 <= 0;
    g = -1 at the nodes, |g| = 1 on the chart axes."""
    w = w_on_sheet(params, sheet, z, region)
    return gauss_map_formula(w, -params.r)


def conformality_residual(params: SurfaceParams, sheet: str, z, region: str = "auto"):
    """phi1^2 + phi2^2 + phi3^2 per dz^2 (identically zero on the curve)."""
    f = phi_dz(params, sheet, z, region)
    return f[..., 0] ** 2 + f[..., 1] ** 2 + f[..., 2] ** 2


# ----------------------------------------------------------------------
# Path segments
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class Segment:
    """An oriented path s in [0,1] -> z(s) on one sheet of the curve."""

    sheet: str
    region: str
    z_of: Callable[[np.ndarray], np.ndarray]
    dz_ds: Callable[[np.ndarray], np.ndarray]
    label: str


def seg_edge_up_from_zero(sheet: str, m: float, region: str = "auto") -> Segment:
    """Bottom-edge leg z = i t from the node z=0 out to t = m (t = m s^2)."""
    m = float(m)
    return Segment(
        sheet, region,
        lambda s: 1j * m * s * s,
        lambda s: 2j * m * s,
        f"edge_up[0->{m:g}]@{sheet}",
    )


def seg_edge_up_from_infinity(sheet: str, m: float, region: str = "outer") -> Segment:
    """Bottom-edge leg z = i t from the node z=oo in to t = m (t = m / s^2)."""
    m = float(m)
    return Segment(
        sheet, region,
        lambda s: 1j * m / (s * s),
        lambda s: -2j * m / (s * s * s),
        f"edge_up[inf->{m:g}]@{sheet}",
    )


def seg_edge_up(sheet: str, t0: float, t1: float, region: str = "auto") -> Segment:
    """Bottom-edge leg z = i t, t linear from t0 to t1 (no singular endpoint)."""
    t0, t1 = float(t0), float(t1)
    return Segment(
        sheet, region,
        lambda s: 1j * (t0 + (t1 - t0) * s),
        lambda s: 1j * (t1 - t0) * np.ones_like(s),
        f"edge_up[{t0:g}->{t1:g}]@{sheet}",
    )


def seg_edge_down_from_zero(sheet: str, m: float, region: str = "auto") -> Segment:
    """Vertical-edge leg z = -i t from the node z=0 out to t = m (t = m s^2)."""
    m = float(m)
    return Segment(
        sheet, region,
        lambda s: -1j * m * s * s,
        lambda s: -2j * m * s,
        f"edge_down[0->{m:g}]@{sheet}",
    )


def seg_edge_down_from_infinity(sheet: str, m: float, region: str = "outer") -> Segment:
    """Vertical-edge leg z = -i t from the node z=oo in to t = m (t = m / s^2)."""
    m = float(m)
    return Segment(
        sheet, region,
        lambda s: -1j * m / (s * s),
        lambda s: 2j * m / (s * s * s),
        f"edge_down[inf->{m:g}]@{sheet}",
    )


def seg_edge_down(sheet: str, t0: float, t1: float, region: str = "auto") -> Segment:
    """Vertical-edge leg z = -i t, t linear from t0 to t1."""
    t0, t1 = float(t0), float(t1)
    return Segment(
        sheet, region,
        lambda s: -1j * (t0 + (t1 - t0) * s),
        lambda s: -1j * (t1 - t0) * np.ones_like(s),
        f"edge_down[{t0:g}->{t1:g}]@{sheet}",
    )


def seg_arc(sheet: str, m: float, th0: float, th1: float, region: str = "auto") -> Segment:
    """Circular arc z = m e^{i theta}, theta linear from th0 to th1."""
    m, th0, th1 = float(m), float(th0), float(th1)

    def z_of(s):
        return m * np.exp(1j * (th0 + (th1 - th0) * s))

    return Segment(
        sheet, region,
        z_of,
        lambda s: 1j * (th1 - th0) * z_of(s),
        f"arc[m={m:g},{th0:.4f}->{th1:.4f}]@{sheet}",
    )


def seg_ring_left_to_tip(params: SurfaceParams, th0: float, region: str) -> Segment:
    """Unit-circle arc on a left sheet from th0 INTO the w-pole at the slit
    tip, with the square-root substitution theta = tip - (tip - th0)(1-s)^2."""
    tip = math.pi - params.rho
    th0 = float(th0)
    d = tip - th0

    def theta(s):
        q = 1.0 - s
        return tip - d * q * q

    return Segment(
        "upper_left", region,
        lambda s: np.exp(1j * theta(s)),
        lambda s: 1j * (2.0 * d * (1.0 - s)) * np.exp(1j * theta(s)),
        f"ring[{th0:.4f}->tip]",
    )


def seg_ring_left_from_tip(params: SurfaceParams, th1: float, region: str) -> Segment:
    """Unit-circle arc on a left sheet OUT of the slit-tip w-pole to th1."""
    tip = math.pi - params.rho
    th1 = float(th1)
    d = tip - th1

    def theta(s):
        return tip - d * s * s

    return Segment(
        "upper_left", region,
        lambda s: np.exp(1j * theta(s)),
        lambda s: -1j * (2.0 * d * s) * np.exp(1j * theta(s)),
        f"ring[tip->{th1:.4f}]",
    )


def seg_slit_bank(params: SurfaceParams, phi0: float, phi1: float, bank: str) -> Segment:
    """Slit-bank arc z = -e^{-i phi}, phi in [-pi/2, rho], rho being the tip.

    ``bank="inner"`` is the bank adjoining |z| < 1 (w = +slit_modulus
    e^{-i pi/4}), ``bank="outer"`` the other one (w negated).  A square-root
    substitution is applied automatically when an endpoint is the tip.
    """
    rho = params.rho
    phi0, phi1 = float(phi0), float(phi1)
    if bank == "inner":
        sheet, region = "upper_left", "inner"
    elif bank == "outer":
        sheet, region = "lower_right", "inner"
    else:
        raise ValueError(f"bank must be 'inner' or 'outer', got {bank!r}")

    if np.isclose(phi1, rho):
        d = rho - phi0

        def phi(s):
            q = 1.0 - s
            return rho - d * q * q

        def dphi(s):
            return 2.0 * d * (1.0 - s)

    elif np.isclose(phi0, rho):
        d = rho - phi1

        def phi(s):
            return rho - d * s * s

        def dphi(s):
            return -2.0 * d * s

    else:
        def phi(s):
            return phi0 + (phi1 - phi0) * s

        def dphi(s):
            return (phi1 - phi0) * np.ones_like(s)

    def z_of(s):
        return -np.exp(-1j * phi(s))

    return Segment(
        sheet, region,
        z_of,
        lambda s: 1j * dphi(s) * np.exp(-1j * phi(s)),
        f"slit[{bank},{phi0:.4f}->{phi1:.4f}]",
    )


def seg_mirror_ring_right(params: SurfaceParams, phi0: float, phi1: float) -> Segment:
    """Right-sheet unit-circle arc z = e^{i phi}, phi in [rho, pi/2]; the
    endpoint phi = rho is that sheet's w-pole and gets the square-root
    substitution."""
    rho = params.rho
    phi0, phi1 = float(phi0), float(phi1)
    if np.isclose(phi1, rho):
        d = rho - phi0

        def phi(s):
            q = 1.0 - s
            return rho - d * q * q

        def dphi(s):
            return 2.0 * d * (1.0 - s)

    elif np.isclose(phi0, rho):
        d = rho - phi1

        def phi(s):
            return rho - d * s * s

        def dphi(s):
            return -2.0 * d * s

    else:
        def phi(s):
            return phi0 + (phi1 - phi0) * s

        def dphi(s):
            return (phi1 - phi0) * np.ones_like(s)

    def z_of(s):
        return np.exp(1j * phi(s))

    return Segment(
        "upper_right", "auto",
        z_of,
        lambda s: 1j * dphi(s) * z_of(s),
        f"mirror_ring[{phi0:.4f}->{phi1:.4f}]",
    )


def reversed_segment(seg: Segment) -> Segment:
    """The same path traversed backwards."""
    return Segment(
        seg.sheet, seg.region,
        lambda s: seg.z_of(1.0 - s),
        lambda s: -seg.dz_ds(1.0 - s),
        f"rev({seg.label})",
    )


# ----------------------------------------------------------------------
# Adaptive Gauss-Legendre path integration (batched GL8/GL16 pairs)
# ----------------------------------------------------------------------

_GL8_X, _GL8_W = np.polynomial.legendre.leggauss(8)
_GL16_X, _GL16_W = np.polynomial.legendre.leggauss(16)


def _seg_values(params: SurfaceParams, seg: Segment, s: np.ndarray, dh_scale: float) -> np.ndarray:
    z = seg.z_of(s)
    dz = seg.dz_ds(s)
    vals = phi_dz(params, seg.sheet, z, seg.region, dh_scale) * dz[..., None]
    if not np.all(np.isfinite(vals)):
        bad = int(np.argwhere(~np.isfinite(vals))[0][0])
        raise IntegrationError(
            f"non-finite integrand on {seg.label} at s={float(np.atleast_1d(s)[bad])!r}"
        )
    return vals


def _gl_wave(params, seg, a, b, dh_scale):
    """GL8/GL16 estimates on a batch of subintervals; returns (I16, err)."""
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    x8 = mid[:, None] + half[:, None] * _GL8_X[None, :]
    x16 = mid[:, None] + half[:, None] * _GL16_X[None, :]
    f8 = _seg_values(params, seg, x8.ravel(), dh_scale).reshape(len(a), 8, 3)
    f16 = _seg_values(params, seg, x16.ravel(), dh_scale).reshape(len(a), 16, 3)
    i8 = half[:, None] * np.einsum("k,nkc->nc", _GL8_W, f8)
    i16 = half[:, None] * np.einsum("k,nkc->nc", _GL16_W, f16)
    err = np.max(np.abs(i16 - i8), axis=1)
    return i16, err


def _adaptive_pairs(
    params: SurfaceParams,
    seg: Segment,
    breaks: np.ndarray,
    rel_tol: float,
    abs_tol: float,
    dh_scale: float,
    max_waves: int = 40,
    max_intervals: int = 200000,
) -> np.ndarray:
    """Integrals of all three components over each [breaks[k], breaks[k+1]]."""
    a = np.asarray(breaks[:-1], dtype=float)
    b = np.asarray(breaks[1:], dtype=float)
    n_pairs = len(a)
    result = np.zeros((n_pairs, 3), dtype=complex)

    i16, err = _gl_wave(params, seg, a, b, dh_scale)
    scale = np.max(np.abs(i16), axis=1)
    tol = np.maximum(abs_tol, rel_tol * scale)
    owner = np.arange(n_pairs)

    for _ in range(max_waves):
        ok = err <= tol
        if np.any(ok):
            np.add.at(result, owner[ok], i16[ok])
        if np.all(ok):
            return result
        a, b = a[~ok], b[~ok]
        owner, tol = owner[~ok], 0.5 * tol[~ok]
        mid = 0.5 * (a + b)
        a = np.concatenate([a, mid])
        b = np.concatenate([mid, b])
        owner = np.concatenate([owner, owner])
        tol = np.concatenate([tol, tol])
        if len(a) > max_intervals:
            raise IntegrationError(
                f"subdivision explosion on {seg.label}: {len(a)} intervals"
            )
        i16, err = _gl_wave(params, seg, a, b, dh_scale)
    raise IntegrationError(
        f"no convergence on {seg.label}: {len(a)} intervals still failing, "
        f"worst err={float(np.max(err)):.3e} tol={float(np.min(tol)):.3e}"
    )


def integrate_segment(
    params: SurfaceParams,
    seg: Segment,
    rel_tol: float = 1e-11,
    abs_tol: float = 1e-14,
    dh_scale: float = 1.0,
) -> np.ndarray:
    """Complex integral of (phi1, phi2, phi3) over one segment; shape (3,)."""
    return _adaptive_pairs(
        params, seg, np.array([0.0, 1.0]), rel_tol, abs_tol, dh_scale
    )[0]


def integrate_path(
    params: SurfaceParams,
    segs: Sequence[Segment],
    rel_tol: float = 1e-11,
    abs_tol: float = 1e-14,
    dh_scale: float = 1.0,
) -> np.ndarray:
    """Complex integral of (phi1, phi2, phi3) along a list of segments."""
    total = np.zeros(3, dtype=complex)
    for seg in segs:
        total += integrate_segment(params, seg, rel_tol, abs_tol, dh_scale)
    return total


def positions_along(
    params: SurfaceParams,
    seg: Segment,
    s_breaks: np.ndarray,
    x0,
    rel_tol: float = 1e-11,
    abs_tol: float = 1e-14,
    dh_scale: float = 1.0,
) -> np.ndarray:
    """Real positions X at the given s-breakpoints, anchored at X(s_breaks[0]) = x0."""
    s_breaks = np.asarray(s_breaks, dtype=float)
    pieces = _adaptive_pairs(params, seg, s_breaks, rel_tol, abs_tol, dh_scale)
    out = np.empty((len(s_breaks), 3), dtype=float)
    out[0] = np.asarray(x0, dtype=float)
    out[1:] = out[0] + np.cumsum(pieces.real, axis=0)
    return out


# ----------------------------------------------------------------------
# Distinguished cycles and checks
# ----------------------------------------------------------------------

def alpha_cycle(
    params: SurfaceParams,
    radius: Optional[float] = None,
    n: int = 1024,
    dh_scale: float = 1.0,
) -> np.ndarray:
    """Real period of the counterclockwise z-circle around the left puncture.

    The loop crosses the bottom chart edge twice, so its two halves live on
    the two sheets meeting there ("upper_left" for Re z <= 0, "lower_left"
    for Re z >= 0).  Expected value: (0, 0, +T).  Uses the periodic
    trapezoid rule (the integrand is analytic and periodic in the loop
    parameter, so convergence is spectral).
    """
    lam = params.lam
    center = 1j / lam
    if radius is None:
        radius = 0.25 * min(1.0 / lam - 1.0, 1.0 / lam - lam,
                            abs(center - np.exp(1j * params.rho)))
    if not 0.0 < radius < 1.0 / lam - 1.0:
        raise ValueError(f"alpha radius {radius!r} leaves the outer region")
    psi = 2.0 * math.pi * np.arange(n) / n
    z = center + radius * np.exp(1j * psi)
    dz = 1j * radius * np.exp(1j * psi)
    vals = np.empty((n, 3), dtype=complex)
    left = z.real <= 0.0
    for mask, sheet in ((left, "upper_left"), (~left, "lower_left")):
        if np.any(mask):
            vals[mask] = phi_dz(params, sheet, z[mask], "outer", dh_scale)
    total = (2.0 * math.pi / n) * np.einsum("nc,n->c", vals, dz)
    return total.real


def descent_axis(
    params: SurfaceParams,
    rel_tol: float = 1e-11,
    abs_tol: float = 1e-14,
    dh_scale: float = 1.0,
) -> np.ndarray:
    """Real displacement along the downward vertical edge from z=0 node to
    the z=oo node (through the far vertical quarter point).  The path is
    pointwise fixed by the x3-axis half-turn, so the expected value is
    (0, 0, -T/2)."""
    segs = [
        seg_edge_down_from_zero("lower_right", 1.0, "inner"),
        reversed_segment(seg_edge_down_from_infinity("upper_left", 1.0, "outer")),
    ]
    return integrate_path(params, segs, rel_tol, abs_tol, dh_scale).real


def vertical_period_gap(
    params: SurfaceParams,
    rel_tol: float = 1e-11,
    abs_tol: float = 1e-14,
) -> np.ndarray:
    """Real period of the homology cycle closing the top-edge loop.

    The cycle is (E + II) - half_turn_x1(E + II): up the right vertical edge
    to the vertical quarter point, along the inner slit bank into the tip,
    then back along the images of both legs under the x1-axis half-turn
    (same z-paths, w negated).  The first component vanishes identically
    (phi1 is even under that half-turn); the other two vanish exactly when
    the two period conditions hold.
    """
    beta = [
        seg_edge_down_from_zero("upper_left", 1.0, "inner"),
        seg_slit_bank(params, -math.pi / 2, params.rho, "inner"),
    ]
    beta_flip = [
        seg_edge_down_from_zero("lower_right", 1.0, "inner"),
        seg_slit_bank(params, -math.pi / 2, params.rho, "outer"),
    ]
    val = integrate_path(params, beta, rel_tol, abs_tol) - integrate_path(
        params, beta_flip, rel_tol, abs_tol
    )
    return val.real


def period_residual_I(
    params: SurfaceParams, rel_tol: float = 1e-11, abs_tol: float = 1e-14
) -> float:
    """Re of the height differential along the right-sheet unit arc from the
    horizontal quarter point (phi = pi/2) into the right w-pole (phi = rho).

    Equals ``(lam sqrt(cos rho) / 2) * F(rho, Lambda)``.
    """
    seg = seg_mirror_ring_right(params, math.pi / 2, params.rho)
    return float(integrate_segment(params, seg, rel_tol, abs_tol)[2].real)


def period_residual_II(
    params: SurfaceParams, rel_tol: float = 1e-11, abs_tol: float = 1e-14
) -> float:
    """Twice the Re of phi2 along the inner slit bank from the vertical
    quarter point (phi = -pi/2) into the tip (phi = rho).

    Equals ``lam sqrt(cos rho) * G(rho, Lambda)``.
    """
    seg = seg_slit_bank(params, -math.pi / 2, params.rho, "inner")
    return float(2.0 * integrate_segment(params, seg, rel_tol, abs_tol)[1].real)


def dh_rate_on_slit_inner(params: SurfaceParams, phis) -> np.ndarray:
    """Re[dh/dphi] along the inner slit bank at the given angles.

    This is the x3-speed of the top-edge track; on the physical branch
    (lam < 1) it is negative throughout, and positive for the diagnostic
    branch lam > 1.
    """
    phis = np.asarray(phis, dtype=float)
    z = -np.exp(-1j * phis)
    dz = 1j * np.exp(-1j * phis)
    f3 = phi_dz(params, "upper_left", z, "inner")[..., 2]
    return (f3 * dz).real


# ----------------------------------------------------------------------
# Point evaluation (for symmetry/homotopy checks)
# ----------------------------------------------------------------------

def x_point(
    params: SurfaceParams,
    sheet: str,
    z: complex,
    route: str = "edge",
    rel_tol: float = 1e-11,
    abs_tol: float = 1e-14,
    dh_scale: float = 1.0,
) -> np.ndarray:
    """X at the point of ``sheet`` over z, by integrating from the origin node.

    Routes (all avoid the punctures; require |z| < 1/lam):

    - ``"edge"``: out the bottom edge to t = |z|, then the circular arc to z.
    - ``"vertical_inner"`` (|z| < 1): down the right vertical edge, then the
      arc from the lower axis.
    - ``"vertical_outer"`` (1 < |z| < 1/lam): from the z=oo node (anchored at
      (0,0,-T/2)) in along the far vertical edge, then the arc.

    The different routes are homotopic in the punctured torus, so they must
    agree; comparing them is a machinery check.
    """
    z = complex(z)
    m = abs(z)
    if not 0.0 < m < 1.0 / params.lam:
        raise ValueError(f"|z|={m!r} outside (0, 1/lam)")
    if sheet in ("upper_left", "lower_right"):
        theta = float(lift_angle_left(z))
        up_angle, down_angle = math.pi / 2, 3.0 * math.pi / 2
    elif sheet in ("upper_right", "lower_left"):
        theta = math.atan2(z.imag, z.real)
        up_angle, down_angle = math.pi / 2, -math.pi / 2
    else:
        raise ValueError(f"unknown sheet {sheet!r}")

    x0 = np.zeros(3)
    segs: List[Segment] = []
    if route == "edge":
        segs.append(seg_edge_up_from_zero(sheet, m))
        start = up_angle
    elif route == "vertical_inner":
        if m >= 1.0:
            raise ValueError("vertical_inner route requires |z| < 1")
        segs.append(seg_edge_down_from_zero(sheet, m, "inner"))
        start = down_angle
    elif route == "vertical_outer":
        if m <= 1.0:
            raise ValueError("vertical_outer route requires |z| > 1")
        x0 = np.array([0.0, 0.0, -0.5 * params.T * dh_scale])
        segs.append(seg_edge_down_from_infinity(sheet, m, "outer"))
        start = down_angle
    else:
        raise ValueError(f"unknown route {route!r}")
    if theta != start:
        segs.append(seg_arc(sheet, m, start, theta))
    return x0 + integrate_path(params, segs, rel_tol, abs_tol, dh_scale).real


# ----------------------------------------------------------------------
# Closed-form edge rates and anchors
# ----------------------------------------------------------------------

def x2_rate_edge(params: SurfaceParams, t):
    """d(x2)/dt along the bottom edge on the left-upper sheet (z = i t).

    Purely real and strictly negative; phi1 and phi3 have no real part
    there, so the edge maps into lines parallel to the x2-axis.
    """
    t = np.asarray(t, dtype=float)
    tau = np.sqrt(
        2.0 * math.cos(params.rho) / (t + 1.0 / t - 2.0 * math.sin(params.rho))
    )
    s_fac = t + 1.0 / t + params.Lambda - 4.0 * math.sin(params.rho)
    return -tau * s_fac / (2.0 * (t - 1.0 / params.lam) ** 2)


def x3_rate_vertical(params: SurfaceParams, t):
    """d(x3)/dt along the right vertical edge (z = -i t, w on the near bank).

    Purely real and positive; the vertical edges map into the x3-axis.
    """
    t = np.asarray(t, dtype=float)
    tau_v = np.sqrt(
        2.0 * math.cos(params.rho) / (t + 1.0 / t + 2.0 * math.sin(params.rho))
    )
    return (t + params.lam) * tau_v / (2.0 * t * (t + 1.0 / params.lam))


def x2_H1(params: SurfaceParams, m: float, spec: QuadratureSpec = _ANCHOR_SPEC) -> float:
    """Total |x2| progress along the bottom edge from the node to t = m < 1/lam."""
    if not 0.0 < m < 1.0 / params.lam:
        raise ValueError(f"m={m!r} outside (0, 1/lam)")
    return float(integrate(lambda t: -x2_rate_edge(params, t), 0.0, float(m), spec).value)


def x2_H2(params: SurfaceParams, m: float, spec: QuadratureSpec = _ANCHOR_SPEC) -> float:
    """Remaining |x2| along the bottom edge from t = m > 1/lam out to the node at oo."""
    if not m > 1.0 / params.lam:
        raise ValueError(f"m={m!r} must exceed 1/lam")

    def integrand(s):
        t = 1.0 / s
        return -x2_rate_edge(params, t) * t * t

    return float(integrate(integrand, 0.0, 1.0 / float(m), spec).value)


def x3_E(params: SurfaceParams, m: float, spec: QuadratureSpec = _ANCHOR_SPEC) -> float:
    """x3 rise along the right vertical edge from the node to t = m."""
    if m <= 0.0:
        raise ValueError("m must be positive")
    return float(integrate(lambda t: x3_rate_vertical(params, t), 0.0, float(m), spec).value)


def x3_E_tail(params: SurfaceParams, m: float, spec: QuadratureSpec = _ANCHOR_SPEC) -> float:
    """Integral of the vertical-edge x3 rate from t = m out to oo."""
    if m <= 0.0:
        raise ValueError("m must be positive")

    def integrand(s):
        t = 1.0 / s
        return x3_rate_vertical(params, t) * t * t

    return float(integrate(integrand, 0.0, 1.0 / float(m), spec).value)


def axis_rise(params: SurfaceParams) -> float:
    """Height of the near vertical quarter point on the x3-axis (= x3_E(1))."""
    return x3_E(params, 1.0)


def x3_Ehat(params: SurfaceParams, m: float) -> float:
    """x3 of the far vertical edge point z = -i m (m is its own t >= 1).

    The far edge descends from the z=oo node at (0,0,-T/2) with the negated
    w, so x3 = -T/2 + x3_E_tail(m); at m = 1 this is -axis_rise.
    """
    return -0.5 * params.T + x3_E_tail(params, m)


def tip_position(
    params: SurfaceParams,
    via: str = "ring",
    rel_tol: float = 1e-12,
    abs_tol: float = 1e-15,
) -> np.ndarray:
    """X at the left w-pole (the slit tip), expected on the negative x1-axis.

    ``via="ring"`` integrates out the bottom edge to the unit circle and
    along the interior gluing arc into the tip; ``via="slit"`` goes up the
    right vertical edge and along the inner slit bank.  The two must agree
    (homotopic paths), and the point is fixed by the x1-axis half-turn so
    its x2 and x3 vanish.
    """
    if via == "ring":
        x0 = np.array([0.0, -x2_H1(params, 1.0), 0.0])
        seg = seg_ring_left_to_tip(params, math.pi / 2, "inner")
        return x0 + integrate_segment(params, seg, rel_tol, abs_tol).real
    if via == "slit":
        x0 = np.array([0.0, 0.0, axis_rise(params)])
        seg = seg_slit_bank(params, -math.pi / 2, params.rho, "inner")
        return x0 + integrate_segment(params, seg, rel_tol, abs_tol).real
    raise ValueError(f"via must be 'ring' or 'slit', got {via!r}")
