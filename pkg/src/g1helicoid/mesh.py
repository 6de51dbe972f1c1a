"""Triangle meshing of the surface: one graph patch, the four-piece
translational fundamental domain, vertical stacking, and file export.

The patch covers the quarter-rectangle whose z-image is the left half-plane:
a polar grid in z (levels of constant |z| = t crossed by rays of constant
arg z in [pi/2, 3pi/2]).  Every boundary piece of the patch is an exact
z-track, so no trimming is needed:

- bottom edge (theta = pi/2):   near ray H1 (t < 1/lam), far ray H2 (t > 1/lam)
- top edge (theta = 3pi/2):     axis segments E (t < 1) and E-hat (t > 1)
- unit circle:                  interior gluing arc + the slit curve C (two banks)
- puncture at z = i/lam:        the helicoidal end; a cutoff disk is excluded

Each level is anchored on the x3-axis (its theta = 3pi/2 endpoint has the
closed-form height) and swept independently, so levels parallelize trivially
and carry no cross-level error accumulation.  The bottom-edge endpoints then
get re-derived by the sweep and checked against the independent closed-form
ray values -- a strong whole-pipeline consistency check.  The first
coordinate of every vertex is additionally checked against the exact global
formula x1 = (2 cos rho / r) Re[1/(z - i/lam)].

The fundamental domain is the patch plus its images under the three axis
half-turns diag(1,-1,-1), diag(-1,-1,1), diag(-1,1,-1); the two
antiholomorphic copies get flipped triangle windings.  Welding is by explicit
seam lists (exact index correspondences), not by fuzzy proximity.
"""

from __future__ import annotations

import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .params import SurfaceParams
from .torus import SYMMETRIES, build_chart, w_on_sheet
from .weierstrass import (
    axis_rise,
    positions_along,
    seg_arc,
    seg_ring_left_to_tip,
    seg_slit_bank,
    x2_H1,
    x2_H2,
    x3_E,
    x3_Ehat,
)

__all__ = [
    "MeshError",
    "SurfaceMesh",
    "mesh_patch_D",
    "assemble_fundamental_domain",
    "stack_periods",
    "check_oriented_manifold",
    "check_graph_injectivity",
    "export_obj",
    "import_obj",
    "export_ply",
    "import_ply",
    "export_curves_csv",
]


class MeshError(RuntimeError):
    """Structural failure while building or exporting a mesh."""


@dataclass
class SurfaceMesh:
    """Triangle mesh with named boundary polylines and build metadata."""

    vertices: np.ndarray
    faces: np.ndarray
    boundary_polylines: Dict[str, np.ndarray] = field(default_factory=dict)
    metadata: Dict[str, object] = field(default_factory=dict)

    def is_empty(self) -> bool:
        return len(self.vertices) == 0 or len(self.faces) == 0

    def bounds(self) -> np.ndarray:
        """(2,3) array [min; max] of vertex coordinates."""
        if len(self.vertices) == 0:
            raise MeshError("empty mesh has no bounds")
        return np.vstack([self.vertices.min(axis=0), self.vertices.max(axis=0)])


# ----------------------------------------------------------------------
# Grid layout
# ----------------------------------------------------------------------

def _level_values(
    params: SurfaceParams, resolution: int, cutoff: float, m_max: float
) -> Tuple[np.ndarray, np.ndarray]:
    """Radii of the constant-|z| levels for the inner (t<1) and outer (t>1)
    blocks.  Levels are uniform in the chart coordinate xi(t) (so cells stay
    near-square in the flat metric), with a geometric band hugging the
    puncture radius 1/lam down to the cutoff distance on both sides."""
    chart = build_chart(params)
    half = 0.5 * chart.width
    dxi = half / resolution
    inner = chart.t_of_xi(np.arange(1, resolution) * dxi)

    t_punct = 1.0 / params.lam
    xi_base = half + np.arange(1, resolution) * dxi
    xi_cap = chart.xi_of_t(m_max)
    base = chart.t_of_xi(xi_base[xi_base < xi_cap - 0.35 * dxi])
    base = base[np.abs(base - t_punct) > 1e-12]

    # local base spacing in t near the puncture: dxi/dt = tau(t) / (2t)
    tau_punct = math.sqrt(
        2.0 * math.cos(params.rho)
        / (t_punct + params.lam - 2.0 * math.sin(params.rho))
    )
    dt_base = dxi * 2.0 * t_punct / tau_punct
    offsets = [cutoff]
    while offsets[-1] * 1.6 < 0.6 * dt_base:
        offsets.append(offsets[-1] * 1.6)
    offsets = np.asarray(offsets)
    band = np.concatenate([t_punct - offsets[::-1], t_punct + offsets])
    band = band[band > 1.0 + 1e-9]

    outer = np.sort(np.concatenate([base, band, [m_max]]))
    # drop base levels that crowd a band level
    band_set = set(band.tolist())
    keep = np.ones(len(outer), dtype=bool)
    for i, t in enumerate(outer):
        if t in band_set:
            continue
        if abs(t - t_punct) < dt_base and np.min(np.abs(t - band)) < 0.45 * cutoff:
            keep[i] = False
    outer = outer[keep]
    return inner, outer


def _ray_angles(params: SurfaceParams, resolution: int, cutoff: float) -> np.ndarray:
    """Ray angles on [pi/2, 3pi/2]: a uniform base, the exact tip angle,
    geometric refinement toward the end direction (pi/2) and around the tip."""
    th_lo, th_hi = 0.5 * math.pi, 1.5 * math.pi
    tip = math.pi - params.rho
    base_step = math.pi / (2 * resolution)
    base = np.linspace(th_lo, th_hi, 2 * resolution + 1)

    d0 = 0.6 * cutoff * params.lam
    end_cluster = []
    d = d0
    while d < base_step:
        end_cluster.append(th_lo + d)
        d *= 1.7
    tip_cluster = []
    d = max(4.0 * d0, 2e-3)
    while d < 0.8 * base_step:
        tip_cluster.extend([tip - d, tip + d])
        d *= 1.7

    rays = np.concatenate([base, [tip], end_cluster, tip_cluster])
    rays = rays[(rays >= th_lo) & (rays <= th_hi)]
    rays = np.unique(rays)
    # dedupe while preserving the exact endpoints and tip angle
    keep = [rays[0]]
    protected = {th_lo, th_hi, tip}
    for v in rays[1:]:
        if v - keep[-1] < 0.35 * d0 and v not in protected:
            continue
        if v in protected and keep[-1] not in protected and v - keep[-1] < 0.35 * d0:
            keep.pop()
        keep.append(v)
    rays = np.asarray(keep)
    if rays[0] != th_lo or rays[-1] != th_hi or tip not in rays:
        raise MeshError("ray layout lost a protected angle")
    return rays


# ----------------------------------------------------------------------
# Patch construction
# ----------------------------------------------------------------------

def _x1_closed_form(params: SurfaceParams, z) -> np.ndarray:
    """Exact first coordinate: x1 = (2 cos rho / r) Re[1/(z - i/lam)]."""
    zeta = np.asarray(z, dtype=complex) - 1j / params.lam
    return (2.0 * math.cos(params.rho) / params.r) * (1.0 / zeta).real


def _sweep_level(
    params: SurfaceParams,
    t: float,
    rays: np.ndarray,
    anchor: np.ndarray,
    rel_tol: float,
    abs_tol: float,
) -> np.ndarray:
    """Vertex positions along one level, indexed like ``rays`` (ascending
    theta).  The sweep runs from the theta = 3pi/2 axis anchor downward."""
    seg = seg_arc("upper_left", t, 1.5 * math.pi, 0.5 * math.pi)
    s_breaks = (1.5 * math.pi - rays[::-1]) / math.pi
    pos = positions_along(params, seg, s_breaks, anchor, rel_tol, abs_tol)
    return pos[::-1]


def _ring_polylines(
    params: SurfaceParams,
    rays: np.ndarray,
    a_rise: float,
    rel_tol: float,
    abs_tol: float,
):
    """Vertex positions on the unit circle: the interior gluing arc
    (theta <= tip), and the two slit banks (theta >= tip), each with its own
    vertex copies.  Returns (glue_pos, inner_pos, outer_pos, masks)."""
    tip = math.pi - params.rho
    glue_mask = rays <= tip
    slit_mask = rays >= tip
    th_glue = rays[glue_mask]
    th_slit = rays[slit_mask]

    seg_glue = seg_ring_left_to_tip(params, 0.5 * math.pi, "inner")
    s_glue = 1.0 - np.sqrt(np.maximum(tip - th_glue, 0.0) / (tip - 0.5 * math.pi))
    anchor_glue = np.array([0.0, -x2_H1(params, 1.0), 0.0])
    glue_pos = positions_along(params, seg_glue, s_glue, anchor_glue, rel_tol, abs_tol)

    phi = math.pi - th_slit  # in [-pi/2, rho], descending theta <-> ascending s
    s_slit = 1.0 - np.sqrt(
        np.maximum(params.rho - phi, 0.0) / (params.rho + 0.5 * math.pi)
    )
    order = np.argsort(s_slit)  # ascending s == descending theta
    s_sorted = s_slit[order]

    seg_in = seg_slit_bank(params, -0.5 * math.pi, params.rho, "inner")
    inner_sorted = positions_along(
        params, seg_in, s_sorted, np.array([0.0, 0.0, a_rise]), rel_tol, abs_tol
    )
    seg_out = seg_slit_bank(params, -0.5 * math.pi, params.rho, "outer")
    outer_sorted = positions_along(
        params, seg_out, s_sorted, np.array([0.0, 0.0, -a_rise]), rel_tol, abs_tol
    )
    inv = np.empty_like(order)
    inv[order] = np.arange(len(order))
    return glue_pos, inner_sorted[inv], outer_sorted[inv], glue_mask, slit_mask


def _split_quad(v, ll, lr, ur, ul):
    """Split a grid quad on its shorter 3D diagonal; deterministic."""
    d1 = np.linalg.norm(v[ll] - v[ur])
    d2 = np.linalg.norm(v[lr] - v[ul])
    if d1 <= d2:
        return [(ll, lr, ur), (ll, ur, ul)]
    return [(ll, lr, ul), (lr, ur, ul)]


def _asymptote_coefficients(params: SurfaceParams):
    """Exact Laurent data of the integrand vector at the puncture:
    f ~ A/zeta^2 + B/zeta + O(1), so X ~ Re[-A/zeta + B Log zeta + C]."""
    e4 = complex(np.exp(0.25j * math.pi))
    rho, lam = params.rho, params.lam
    c0 = 1j / lam
    w0 = complex(w_on_sheet(params, "upper_left", np.array([c0]), "outer")[0])
    q0 = c0 * c0 + 1j * (params.Lambda - 4.0 * math.sin(rho)) * c0 - 1.0
    dq0 = 2.0 * c0 + 1j * (params.Lambda - 4.0 * math.sin(rho))
    d_fac = (np.exp(1j * rho) - c0) * (c0 + np.exp(-1j * rho))
    dd_fac = (np.exp(1j * rho) - c0) - (c0 + np.exp(-1j * rho))
    dw0 = 0.5 * w0 * (1.0 / c0 - dd_fac / d_fac)

    A = np.zeros(3, dtype=complex)
    B = np.zeros(3, dtype=complex)
    A[0] = -2.0 * math.cos(rho) / params.r
    h2 = lambda z, w, q: -1j * e4 * q * w / (2.0 * z)
    A[1] = h2(c0, w0, q0)
    B[1] = -1j * e4 * ((dq0 * w0 + q0 * dw0) / (2.0 * c0) - q0 * w0 / (2.0 * c0 * c0))
    B[2] = e4 * (c0 - 1j * lam) * w0 / (2.0 * c0)
    return A, B


def _asymptote_positions(A, B, C, zeta: np.ndarray) -> np.ndarray:
    """Re[-A/zeta + B Log zeta + C] with the log branch continuous on the
    left half-disk (angles lifted to [pi/2, 3pi/2])."""
    ang = np.arctan2(zeta.imag, zeta.real)
    ang = np.where(ang < 0.25 * math.pi, ang + 2.0 * math.pi, ang)
    logz = np.log(np.abs(zeta)) + 1j * ang
    vals = -A[None, :] / zeta[:, None] + B[None, :] * logz[:, None] + C[None, :]
    return vals.real


def mesh_patch_D(
    params: SurfaceParams,
    resolution: int = 48,
    cutoff: float = 1e-2,
    end_cap: bool = True,
    m_max: Optional[float] = None,
    rel_tol: float = 1e-10,
    abs_tol: Optional[float] = None,
    slab_tol: Optional[float] = None,
    threads: Optional[int] = None,
) -> SurfaceMesh:
    """Mesh the graph patch (z in the left half-plane, one quarter-rectangle).

    ``cutoff`` is the excluded z-distance around the puncture z = i/lam;
    ``m_max`` truncates |z| near the far node (default 10/lam, where the
    grid closes with a fan onto the exact node image).  With ``end_cap`` the
    truncated helicoidal end is continued by an asymptote strip, flagged in
    ``metadata['asymptotic_cap']`` (its vertices are approximations, not
    surface samples, and are excluded from the exactness checks).
    """
    if resolution < 8:
        raise MeshError("resolution must be at least 8")
    if not 0.0 < cutoff < 0.2 * (1.0 / params.lam - 1.0):
        raise MeshError(f"cutoff {cutoff!r} out of safe range")
    if m_max is None:
        m_max = 10.0 / params.lam
    if m_max <= 2.0 / params.lam:
        raise MeshError("m_max must exceed twice the puncture radius")
    T = params.T
    if abs_tol is None:
        abs_tol = 1e-13 * T
    if slab_tol is None:
        slab_tol = 1e-6 * T
    t_punct = 1.0 / params.lam
    a_rise = axis_rise(params)

    inner_t, outer_t = _level_values(params, resolution, cutoff, m_max)
    rays = _ray_angles(params, resolution, cutoff)
    n_rays = len(rays)

    # --- integrate level polylines (each anchored on the x3-axis) --------
    def inner_level(t: float) -> np.ndarray:
        anchor = np.array([0.0, 0.0, x3_E(params, t)])
        return _sweep_level(params, t, rays, anchor, rel_tol, abs_tol)

    def outer_level(t: float) -> np.ndarray:
        anchor = np.array([0.0, 0.0, x3_Ehat(params, t)])
        return _sweep_level(params, t, rays, anchor, rel_tol, abs_tol)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            inner_pos = list(pool.map(inner_level, inner_t))
            outer_pos = list(pool.map(outer_level, outer_t))
    else:
        inner_pos = [inner_level(t) for t in inner_t]
        outer_pos = [outer_level(t) for t in outer_t]

    glue_pos, bank_in_pos, bank_out_pos, glue_mask, slit_mask = _ring_polylines(
        params, rays, a_rise, rel_tol, abs_tol
    )

    # --- closure checks against independent closed forms -----------------
    def _closure_tol(poly: np.ndarray) -> float:
        arc = float(np.sum(np.linalg.norm(np.diff(poly, axis=0), axis=1)))
        return 5e-9 * (T + arc)

    for t, poly in zip(inner_t, inner_pos):
        expect = np.array([0.0, -x2_H1(params, float(t)), 0.0])
        gap = float(np.linalg.norm(poly[0] - expect))
        if gap > _closure_tol(poly):
            raise MeshError(
                f"closure failure at level t={t:.6g}, theta=pi/2: gap {gap:.3e}"
            )
    for t, poly in zip(outer_t, outer_pos):
        if t < t_punct:
            expect = np.array([0.0, -x2_H1(params, float(t)), 0.0])
        else:
            expect = np.array([0.0, x2_H2(params, float(t)), -0.5 * T])
        gap = float(np.linalg.norm(poly[0] - expect))
        if gap > _closure_tol(poly):
            raise MeshError(
                f"closure failure at level t={t:.6g}, theta=pi/2: gap {gap:.3e}"
            )
    # tip agreement between the three ring polylines (the slit arrays are
    # indexed by ascending theta over rays >= tip, so the tip entry is first)
    tip_from_glue = glue_pos[-1]
    tip_from_in = bank_in_pos[0]
    tip_from_out = bank_out_pos[0]
    tol_tip = 5e-9 * (T + float(np.abs(glue_pos).max()))
    if (
        np.linalg.norm(tip_from_glue - tip_from_in) > tol_tip
        or np.linalg.norm(tip_from_glue - tip_from_out) > tol_tip
    ):
        raise MeshError(
            "slit-tip closure failure: "
            f"{np.linalg.norm(tip_from_glue - tip_from_in):.3e} / "
            f"{np.linalg.norm(tip_from_glue - tip_from_out):.3e}"
        )

    # --- assemble the vertex table ---------------------------------------
    verts: List[np.ndarray] = []

    def add(pos) -> int:
        verts.append(np.asarray(pos, dtype=float))
        return len(verts) - 1

    idx_O = add([0.0, 0.0, 0.0])
    idx_Op = add([0.0, 0.0, -0.5 * T])

    inner_rows = [np.array([add(p) for p in poly]) for poly in inner_pos]
    outer_rows = [np.array([add(p) for p in poly]) for poly in outer_pos]

    glue_ids = np.array([add(p) for p in glue_pos])
    tip_vertex = glue_ids[-1]
    slit_rays = rays[slit_mask]
    bank_in_ids = np.concatenate(
        [[tip_vertex], [add(p) for p in bank_in_pos[1:]]]
    ).astype(int)
    bank_out_ids = np.concatenate(
        [[tip_vertex], [add(p) for p in bank_out_pos[1:]]]
    ).astype(int)

    def ring_row(bank_ids: np.ndarray) -> np.ndarray:
        row = np.empty(n_rays, dtype=int)
        row[glue_mask] = glue_ids
        row[slit_mask] = bank_ids
        return row

    ring_row_inner = ring_row(bank_in_ids)
    ring_row_outer = ring_row(bank_out_ids)

    vertices = np.vstack(verts)

    # --- exactness and slab validation ------------------------------------
    level_ts = np.concatenate([inner_t, [1.0], outer_t])
    row_ids_for_check = inner_rows + [ring_row_inner] + outer_rows
    z_rows = (
        [t * np.exp(1j * rays) for t in inner_t]
        + [np.exp(1j * rays)]
        + [t * np.exp(1j * rays) for t in outer_t]
    )
    check_ts = np.concatenate([level_ts, [1.0]])
    check_rows = row_ids_for_check + [ring_row_outer]
    check_zs = z_rows + [np.exp(1j * rays)]
    worst_x1 = 0.0
    for t, row, zr in zip(check_ts, check_rows, check_zs):
        x1_exact = _x1_closed_form(params, zr)
        dev = np.abs(vertices[row, 0] - x1_exact)
        j = int(np.argmax(dev))
        worst_x1 = max(worst_x1, float(dev[j]))
        if dev[j] > 1e-7 * (T + float(np.abs(x1_exact[j]))):
            raise MeshError(
                f"x1 closed-form violation at cell t={t:.6g}, "
                f"theta={rays[j]:.6g}: dev {dev[j]:.3e}"
            )
    lo, hi = -0.5 * T - slab_tol, a_rise + slab_tol
    x1v, x3v = vertices[:, 0], vertices[:, 2]
    bad = np.where((x1v > slab_tol) | (x3v < lo) | (x3v > hi))[0]
    if len(bad) > 0:
        raise MeshError(
            f"slab violation at vertex {int(bad[0])}: {vertices[bad[0]]!r}"
        )

    # --- faces -------------------------------------------------------------
    rows: List[np.ndarray] = (
        [np.array([idx_O])]
        + inner_rows
        + [ring_row_inner, ring_row_outer]
        + outer_rows
        + [np.array([idx_Op])]
    )
    ring_lo_row = 1 + len(inner_rows)  # index of ring_row_inner in rows

    # locate the band gap straddling the puncture (hole cell column 0);
    # outer_rows[k] sits at rows index ring_lo_row + 2 + k
    outer_start = ring_lo_row + 2
    hole_pair = None
    for k in range(len(outer_t) - 1):
        if outer_t[k] < t_punct < outer_t[k + 1]:
            hole_pair = (outer_start + k, outer_start + k + 1)
            break
    if hole_pair is None:
        raise MeshError("no level pair straddles the puncture radius")

    faces: List[Tuple[int, int, int]] = []
    for r in range(len(rows) - 1):
        lo_row, hi_row = rows[r], rows[r + 1]
        if (r, r + 1) == (ring_lo_row, ring_lo_row + 1):
            continue  # the two ring rows are the same curve, no cells
        if len(lo_row) == 1 and len(hi_row) == 1:
            raise MeshError("degenerate row pair")
        for j in range(n_rays - 1):
            if (r, r + 1) == hole_pair and j == 0:
                continue  # the excluded cell around the puncture
            if len(lo_row) == 1:
                faces.append((lo_row[0], hi_row[j + 1], hi_row[j]))
                continue
            if len(hi_row) == 1:
                faces.append((lo_row[j], lo_row[j + 1], hi_row[0]))
                continue
            ll, lr = int(lo_row[j]), int(lo_row[j + 1])
            ul, ur = int(hi_row[j]), int(hi_row[j + 1])
            if ll == lr or ul == ur:
                if ll == lr:
                    faces.append((ll, ur, ul))
                else:
                    faces.append((ll, lr, ul))
                continue
            faces.extend(_split_quad(vertices, ll, lr, ur, ul))

    # --- boundary polylines -------------------------------------------------
    below = np.where(level_ts < t_punct)[0]
    above = np.where(level_ts > t_punct)[0]
    all_rows_by_level = row_ids_for_check
    h1_ids = [idx_O] + [int(all_rows_by_level[k][0]) for k in below]
    h2_ids = [int(all_rows_by_level[k][0]) for k in above] + [idx_Op]
    e_ids = [idx_O] + [int(r[-1]) for r in inner_rows] + [int(ring_row_inner[-1])]
    ehat_ids = (
        [int(ring_row_outer[-1])] + [int(r[-1]) for r in outer_rows] + [idx_Op]
    )
    c_ids = list(bank_in_ids[::-1]) + list(bank_out_ids[1:])
    hole_lo = rows[hole_pair[0]]
    hole_hi = rows[hole_pair[1]]
    end_ids = [int(hole_lo[0]), int(hole_lo[1]), int(hole_hi[1]), int(hole_hi[0])]

    boundary = {
        "H1": vertices[h1_ids],
        "H2": vertices[h2_ids],
        "E": vertices[e_ids],
        "E_hat": vertices[ehat_ids],
        "C": vertices[c_ids],
        "end": vertices[end_ids],
    }
    c_proj = boundary["C"].copy()
    c_proj[:, 2] = 0.0
    boundary["c"] = c_proj

    interior = np.ones(len(vertices), dtype=bool)
    for ids in (h1_ids, h2_ids, e_ids, ehat_ids, c_ids, end_ids, [idx_O, idx_Op]):
        interior[np.asarray(ids, dtype=int)] = False

    faces_arr = np.asarray(faces, dtype=int)
    areas = _face_areas(vertices, faces_arr)
    tiny = np.where(areas < (1e-8 * T) ** 2)[0]
    if len(tiny) > 0:
        raise MeshError(f"degenerate face {int(tiny[0])}: area {areas[tiny[0]]:.3e}")

    metadata: Dict[str, object] = {
        "rho0": params.rho,
        "lambda0": params.lam,
        "Lambda0": params.Lambda,
        "T": T,
        "a": a_rise,
        "resolution": resolution,
        "cutoff": cutoff,
        "m_max": m_max,
        "worst_x1_closed_form_dev": worst_x1,
        "interior_mask": interior,
        "seam_ids": {
            "H1": np.asarray(h1_ids, dtype=int),
            "H2": np.asarray(h2_ids, dtype=int),
            "E": np.asarray(e_ids, dtype=int),
            "E_hat": np.asarray(ehat_ids, dtype=int),
            "C": np.asarray(c_ids, dtype=int),
        },
        "asymptotic_cap": {"enabled": False},
    }

    mesh = SurfaceMesh(vertices, faces_arr, boundary, metadata)

    if end_cap:
        _append_asymptotic_cap(params, mesh, cutoff, hole_lo, hole_hi, rays)

    return mesh


def _face_areas(vertices: np.ndarray, faces: np.ndarray) -> np.ndarray:
    a = vertices[faces[:, 1]] - vertices[faces[:, 0]]
    b = vertices[faces[:, 2]] - vertices[faces[:, 0]]
    return 0.5 * np.linalg.norm(np.cross(a, b), axis=1)


def _append_asymptotic_cap(
    params: SurfaceParams,
    mesh: SurfaceMesh,
    cutoff: float,
    hole_lo: np.ndarray,
    hole_hi: np.ndarray,
    rays: np.ndarray,
    n_angles: int = 49,
    n_rings: int = 4,
) -> None:
    """Continue the truncated end by a strip of the exact first-order
    asymptote X ~ Re[-A/zeta + B Log zeta + C].  The strip is a separate
    component (not stitched to the exact-surface grid) and is flagged in the
    metadata; its constant C is fitted from the hole-rim vertices."""
    A, B = _asymptote_coefficients(params)
    t_punct = 1.0 / params.lam
    rim_ids = np.asarray(
        [hole_lo[0], hole_lo[1], hole_hi[1], hole_hi[0]], dtype=int
    )
    # rim zeta values: the straddling levels sit at t_punct -+ cutoff
    t_below = t_punct - cutoff
    t_above = t_punct + cutoff
    zeta_rim = np.array(
        [
            t_below * np.exp(1j * rays[0]) - 1j * t_punct,
            t_below * np.exp(1j * rays[1]) - 1j * t_punct,
            t_above * np.exp(1j * rays[1]) - 1j * t_punct,
            t_above * np.exp(1j * rays[0]) - 1j * t_punct,
        ]
    )
    base = _asymptote_positions(A, B, np.zeros(3), zeta_rim)
    C = np.mean(mesh.vertices[rim_ids] - base, axis=0)

    chi = np.linspace(0.5 * math.pi, 1.5 * math.pi, n_angles)
    radii = cutoff * 0.5 ** np.arange(n_rings)
    ring_ids = []
    n0 = len(mesh.vertices)
    new_verts = []
    for rad in radii:
        zeta = rad * np.exp(1j * chi)
        pos = _asymptote_positions(A, B, C, zeta)
        ids = n0 + len(new_verts) + np.arange(n_angles)
        new_verts.extend(pos)
        ring_ids.append(ids)
    new_faces = []
    vtmp = np.vstack([mesh.vertices, np.asarray(new_verts)])
    for k in range(n_rings - 1):
        lo, hi = ring_ids[k], ring_ids[k + 1]
        for j in range(n_angles - 1):
            new_faces.extend(
                _split_quad(vtmp, int(lo[j]), int(lo[j + 1]), int(hi[j + 1]), int(hi[j]))
            )
    mesh.vertices = vtmp
    mesh.faces = np.vstack([mesh.faces, np.asarray(new_faces, dtype=int)])
    interior = mesh.metadata["interior_mask"]
    mesh.metadata["interior_mask"] = np.concatenate(
        [interior, np.zeros(len(new_verts), dtype=bool)]
    )
    mesh.metadata["asymptotic_cap"] = {
        "enabled": True,
        "vertex_start": int(n0),
        "vertex_count": int(len(new_verts)),
        "inner_radius": float(radii[-1]),
    }


# ----------------------------------------------------------------------
# Assembly, welding, stacking
# ----------------------------------------------------------------------

_COPY_SPECS = (
    ("base", None),
    ("half_turn_x1", "half_turn_x1"),
    ("half_turn_x3", "half_turn_x3"),
    ("half_turn_x2", "half_turn_x2"),
)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = np.arange(n)

    def find(self, i: int) -> int:
        p = self.parent
        while p[i] != i:
            p[i] = p[p[i]]
            i = p[i]
        return i

    def union(self, i: int, j: int) -> None:
        ri, rj = self.find(i), self.find(j)
        if ri != rj:
            self.parent[max(ri, rj)] = min(ri, rj)


def _weld_by_pairs(
    vertices: np.ndarray,
    faces: np.ndarray,
    pairs: Sequence[Tuple[np.ndarray, np.ndarray, str]],
    tol: float,
):
    """Merge vertices along explicit seam index pairs; validates gaps first.

    Returns (vertices, faces, old_to_new, n_duplicates_removed).
    """
    uf = _UnionFind(len(vertices))
    for ids_a, ids_b, label in pairs:
        if len(ids_a) != len(ids_b):
            raise MeshError(f"seam {label}: length mismatch {len(ids_a)} vs {len(ids_b)}")
        gaps = np.linalg.norm(vertices[ids_a] - vertices[ids_b], axis=1)
        worst = float(gaps.max()) if len(gaps) else 0.0
        if worst > tol:
            raise MeshError(f"seam {label}: max gap {worst:.3e} exceeds weld tol {tol:.3e}")
        for i, j in zip(ids_a, ids_b):
            uf.union(int(i), int(j))
    roots = np.array([uf.find(i) for i in range(len(vertices))])
    unique_roots, old_to_new = np.unique(roots, return_inverse=True)
    new_vertices = vertices[unique_roots]
    new_faces = old_to_new[faces]
    keep = (
        (new_faces[:, 0] != new_faces[:, 1])
        & (new_faces[:, 1] != new_faces[:, 2])
        & (new_faces[:, 0] != new_faces[:, 2])
    )
    return new_vertices, new_faces[keep], old_to_new, len(vertices) - len(unique_roots)


def assemble_fundamental_domain(
    patch: SurfaceMesh, weld_tol: Optional[float] = None
) -> SurfaceMesh:
    """One translational fundamental domain: the patch plus its images under
    the three axis half-turns, welded along the shared boundary curves.

    The two antiholomorphic copies (x3-axis and x2-axis half-turns) get
    flipped triangle windings so the assembled orientation is consistent.
    """
    if patch.is_empty():
        raise MeshError("cannot assemble from an empty patch")
    T = float(patch.metadata["T"])
    if weld_tol is None:
        weld_tol = 1e-7 * T
    n = len(patch.vertices)
    seams = patch.metadata["seam_ids"]

    verts_all = []
    faces_all = []
    offsets = {}
    for k, (name, sym) in enumerate(_COPY_SPECS):
        mat = np.eye(3) if sym is None else SYMMETRIES[sym].space_matrix
        flip = sym is not None and SYMMETRIES[sym].orientation < 0
        v = patch.vertices @ mat.T
        f = patch.faces + k * n
        if flip:
            f = f[:, ::-1]
        offsets[name] = k * n
        verts_all.append(v)
        faces_all.append(f)
    vertices = np.vstack(verts_all)
    faces = np.vstack(faces_all)

    def ids(copy: str, seam: str) -> np.ndarray:
        return np.asarray(seams[seam], dtype=int) + offsets[copy]

    pairs = [
        (ids("base", "C"), ids("half_turn_x1", "C")[::-1], "C: base~x1"),
        (ids("half_turn_x3", "C"), ids("half_turn_x2", "C")[::-1], "C: x3~x2"),
        (ids("base", "E"), ids("half_turn_x3", "E"), "E: base~x3"),
        (ids("base", "E_hat"), ids("half_turn_x3", "E_hat"), "E_hat: base~x3"),
        (ids("half_turn_x1", "E"), ids("half_turn_x2", "E"), "E: x1~x2"),
        (ids("half_turn_x1", "E_hat"), ids("half_turn_x2", "E_hat"), "E_hat: x1~x2"),
        (ids("base", "H1"), ids("half_turn_x2", "H1"), "H1: base~x2"),
        (ids("half_turn_x1", "H1"), ids("half_turn_x3", "H1"), "H1: x1~x3"),
    ]
    new_vertices, new_faces, old_to_new, removed = _weld_by_pairs(
        vertices, faces, pairs, weld_tol
    )

    boundary = {}
    for k, (name, sym) in enumerate(_COPY_SPECS):
        mat = np.eye(3) if sym is None else SYMMETRIES[sym].space_matrix
        for bname, poly in patch.boundary_polylines.items():
            boundary[f"{bname}@{name}"] = poly @ mat.T

    stack_seams = {
        "bottom_pos_x2": old_to_new[ids("base", "H2")],
        "bottom_neg_x2": old_to_new[ids("half_turn_x3", "H2")],
        "top_pos_x2": old_to_new[ids("half_turn_x2", "H2")],
        "top_neg_x2": old_to_new[ids("half_turn_x1", "H2")],
    }

    metadata = dict(patch.metadata)
    metadata.pop("interior_mask", None)
    metadata.pop("seam_ids", None)
    metadata["weld_tol"] = weld_tol
    metadata["weld_duplicates_removed"] = removed
    metadata["vertices_before_weld"] = 4 * n
    metadata["stack_seams"] = stack_seams
    metadata["copies"] = [name for name, _ in _COPY_SPECS]

    fd = SurfaceMesh(new_vertices, new_faces, boundary, metadata)
    report = check_oriented_manifold(fd)
    if report["misoriented_edges"] or report["overused_edges"]:
        raise MeshError(
            "fundamental domain is not consistently oriented: "
            f"{report['misoriented_edges']} misoriented, "
            f"{report['overused_edges']} overused edges"
        )
    return fd


def stack_periods(domain: SurfaceMesh, k: int, weld_tol: Optional[float] = None) -> SurfaceMesh:
    """k copies of the fundamental domain translated by (0,0,T) steps, welded
    along the matching horizontal boundary lines."""
    if k < 1:
        raise MeshError("k must be >= 1")
    if domain.is_empty():
        raise MeshError("cannot stack an empty mesh")
    if k == 1:
        return domain
    T = float(domain.metadata["T"])
    if weld_tol is None:
        weld_tol = float(domain.metadata.get("weld_tol", 1e-7 * T))
    n = len(domain.vertices)
    seams = domain.metadata["stack_seams"]
    shift = np.array([0.0, 0.0, T])

    vertices = np.vstack([domain.vertices + j * shift for j in range(k)])
    faces = np.vstack([domain.faces + j * n for j in range(k)])
    pairs = []
    for j in range(k - 1):
        pairs.append(
            (
                np.asarray(seams["top_pos_x2"], dtype=int) + j * n,
                np.asarray(seams["bottom_pos_x2"], dtype=int) + (j + 1) * n,
                f"stack pos-x2 {j}~{j+1}",
            )
        )
        pairs.append(
            (
                np.asarray(seams["top_neg_x2"], dtype=int) + j * n,
                np.asarray(seams["bottom_neg_x2"], dtype=int) + (j + 1) * n,
                f"stack neg-x2 {j}~{j+1}",
            )
        )
    new_vertices, new_faces, old_to_new, removed = _weld_by_pairs(
        vertices, faces, pairs, weld_tol
    )
    boundary = {}
    for j in range(k):
        for bname, poly in domain.boundary_polylines.items():
            boundary[f"{bname}+{j}T"] = poly + j * shift
    metadata = dict(domain.metadata)
    metadata["stacked_copies"] = k
    metadata["stack_duplicates_removed"] = removed
    metadata.pop("stack_seams", None)
    return SurfaceMesh(new_vertices, new_faces, boundary, metadata)


# ----------------------------------------------------------------------
# Planar geometry helpers (shared with the verification module)
# ----------------------------------------------------------------------

def point_in_polygon(points: np.ndarray, polygon: np.ndarray) -> np.ndarray:
    """Even-odd ray-cast test; ``points`` (N,2), ``polygon`` (M,2) closed or
    open (the closing edge is implied).  Boundary points are unspecified."""
    pts = np.asarray(points, dtype=float)
    poly = np.asarray(polygon, dtype=float)
    if np.linalg.norm(poly[0] - poly[-1]) > 0:
        poly = np.vstack([poly, poly[0]])
    x, y = pts[:, 0][:, None], pts[:, 1][:, None]
    x0, y0 = poly[:-1, 0][None, :], poly[:-1, 1][None, :]
    x1, y1 = poly[1:, 0][None, :], poly[1:, 1][None, :]
    straddle = (y0 <= y) != (y1 <= y)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = x0 + (y - y0) * (x1 - x0) / (y1 - y0)
    hits = straddle & (x_cross > x)
    return np.sum(hits, axis=1) % 2 == 1


def distance_to_polyline(points: np.ndarray, polyline: np.ndarray) -> np.ndarray:
    """Euclidean distance from each 2D point to an open 2D polyline."""
    pts = np.asarray(points, dtype=float)
    poly = np.asarray(polyline, dtype=float)
    a, b = poly[:-1], poly[1:]
    ab = b - a
    denom = np.maximum(np.einsum("ij,ij->i", ab, ab), 1e-300)
    diff = pts[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum("pke,ke->pk", diff, ab) / denom[None, :], 0.0, 1.0)
    proj = a[None, :, :] + t[..., None] * ab[None, :, :]
    d = np.linalg.norm(pts[:, None, :] - proj, axis=2)
    return d.min(axis=1)


# ----------------------------------------------------------------------
# Structural checks
# ----------------------------------------------------------------------

def check_oriented_manifold(mesh: SurfaceMesh) -> Dict[str, int]:
    """Edge-use report: interior edges must be shared by exactly two faces
    with opposite orientation; boundary edges by one."""
    edge_use: Dict[Tuple[int, int], List[int]] = {}
    for face in mesh.faces:
        for a, b in ((face[0], face[1]), (face[1], face[2]), (face[2], face[0])):
            key = (min(a, b), max(a, b))
            edge_use.setdefault(key, []).append(1 if a < b else -1)
    interior = boundary = misoriented = overused = 0
    for uses in edge_use.values():
        if len(uses) == 1:
            boundary += 1
        elif len(uses) == 2:
            if uses[0] + uses[1] == 0:
                interior += 1
            else:
                misoriented += 1
        else:
            overused += 1
    return {
        "interior_edges": interior,
        "boundary_edges": boundary,
        "misoriented_edges": misoriented,
        "overused_edges": overused,
    }


def check_graph_injectivity(
    patch: SurfaceMesh,
    separation: Optional[float] = None,
    margin: Optional[float] = None,
) -> Dict[str, object]:
    """Spatial-hash collision check of the graph property.

    The patch projects injectively to the (x1, x2)-plane over the unbounded
    domain outside the projected slit curve ``c`` -- the projection genuinely
    folds along the axis segments (the normal is horizontal there), and those
    folds live inside the lens bounded by ``c``.  So the check restricts to
    interior vertices whose projection is outside that lens and at least
    ``margin`` away from it, then flags any two that land closer than
    ``separation`` in the plane while being far apart in space."""
    T = float(patch.metadata["T"])
    if separation is None:
        separation = 1e-4 * T
    if margin is None:
        margin = 0.02 * T
    mask = patch.metadata.get("interior_mask")
    if mask is None:
        raise MeshError("patch has no interior mask (is this an assembled mesh?)")
    pts = patch.vertices[mask]
    lens = np.asarray(patch.boundary_polylines["c"])[:, :2]
    inside = point_in_polygon(pts[:, :2], lens)
    near = distance_to_polyline(pts[:, :2], lens) < margin
    pts = pts[~inside & ~near]
    cells: Dict[Tuple[int, int], List[int]] = {}
    h = 2.0 * separation
    keys = np.floor(pts[:, :2] / h).astype(int)
    for i, key in enumerate(map(tuple, keys)):
        cells.setdefault(key, []).append(i)
    collisions = []
    for i, key in enumerate(map(tuple, keys)):
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                for j in cells.get((key[0] + dx, key[1] + dy), ()):
                    if j <= i:
                        continue
                    planar = np.linalg.norm(pts[i, :2] - pts[j, :2])
                    if planar < separation:
                        vertical = abs(pts[i, 2] - pts[j, 2])
                        if vertical > 10.0 * separation:
                            collisions.append((i, j, planar, vertical))
    return {"checked": int(len(pts)), "collisions": collisions}


# ----------------------------------------------------------------------
# Export / import
# ----------------------------------------------------------------------

def _require_nonempty(mesh: SurfaceMesh) -> None:
    if mesh.is_empty():
        raise MeshError("refusing to export an empty mesh")


def _metadata_header_lines(mesh: SurfaceMesh) -> List[str]:
    md = mesh.metadata
    lines = ["artifact surface mesh"]
    prov = md.get("provenance")
    if isinstance(prov, (list, tuple)):
        lines.extend(str(p) for p in prov)
    for key in ("rho0", "lambda0", "Lambda0", "T", "a", "resolution", "cutoff"):
        if key in md:
            lines.append(f"{key} = {md[key]!r}")
    cap = md.get("asymptotic_cap")
    if isinstance(cap, dict) and cap.get("enabled"):
        lines.append(
            f"asymptotic cap: vertices {cap['vertex_start']}.."
            f"{cap['vertex_start'] + cap['vertex_count'] - 1}"
        )
    return lines


def export_obj(mesh: SurfaceMesh, path: str) -> None:
    """ASCII OBJ (v/f records, 1-based indices, 9 significant digits)."""
    _require_nonempty(mesh)
    try:
        with open(path, "w", encoding="ascii") as fh:
            for line in _metadata_header_lines(mesh):
                fh.write(f"# {line}\n")
            for v in mesh.vertices:
                fh.write(f"v {v[0]:.9g} {v[1]:.9g} {v[2]:.9g}\n")
            for f in mesh.faces:
                fh.write(f"f {f[0] + 1} {f[1] + 1} {f[2] + 1}\n")
    except OSError as exc:
        raise MeshError(f"OBJ export failed for {path!r}: {exc}") from exc


def import_obj(path: str) -> SurfaceMesh:
    vertices: List[List[float]] = []
    faces: List[List[int]] = []
    try:
        with open(path, "r", encoding="ascii") as fh:
            for line in fh:
                parts = line.split()
                if not parts or parts[0] == "#":
                    continue
                if parts[0] == "v":
                    vertices.append([float(x) for x in parts[1:4]])
                elif parts[0] == "f":
                    faces.append([int(x.split("/")[0]) - 1 for x in parts[1:4]])
    except OSError as exc:
        raise MeshError(f"OBJ import failed for {path!r}: {exc}") from exc
    if not vertices:
        raise MeshError(f"no vertices found in {path!r}")
    return SurfaceMesh(np.asarray(vertices), np.asarray(faces, dtype=int))


def export_ply(mesh: SurfaceMesh, path: str) -> None:
    """Binary little-endian PLY with float64 coordinates."""
    _require_nonempty(mesh)
    nv, nf = len(mesh.vertices), len(mesh.faces)
    header_lines = (
        ["ply", "format binary_little_endian 1.0"]
        + [f"comment {line}" for line in _metadata_header_lines(mesh)]
        + [
            f"element vertex {nv}",
            "property double x",
            "property double y",
            "property double z",
            f"element face {nf}",
            "property list uchar int vertex_indices",
            "end_header",
        ]
    )
    try:
        with open(path, "wb") as fh:
            fh.write(("\n".join(header_lines) + "\n").encode("ascii"))
            fh.write(np.ascontiguousarray(mesh.vertices, dtype="<f8").tobytes())
            face_block = bytearray()
            for f in mesh.faces:
                face_block += struct.pack("<Biii", 3, int(f[0]), int(f[1]), int(f[2]))
            fh.write(bytes(face_block))
    except OSError as exc:
        raise MeshError(f"PLY export failed for {path!r}: {exc}") from exc


def import_ply(path: str) -> SurfaceMesh:
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise MeshError(f"PLY import failed for {path!r}: {exc}") from exc
    end = data.find(b"end_header\n")
    if end < 0:
        raise MeshError(f"{path!r} is not a PLY file")
    header = data[:end].decode("ascii").splitlines()
    nv = nf = 0
    for line in header:
        if line.startswith("element vertex"):
            nv = int(line.split()[-1])
        elif line.startswith("element face"):
            nf = int(line.split()[-1])
    if "format binary_little_endian 1.0" not in header:
        raise MeshError(f"{path!r}: unsupported PLY format")
    body = data[end + len(b"end_header\n"):]
    vert_bytes = nv * 24
    vertices = np.frombuffer(body[:vert_bytes], dtype="<f8").reshape(nv, 3).copy()
    faces = np.empty((nf, 3), dtype=int)
    off = vert_bytes
    for i in range(nf):
        cnt = body[off]
        if cnt != 3:
            raise MeshError(f"{path!r}: non-triangular face of size {cnt}")
        faces[i] = struct.unpack_from("<iii", body, off + 1)
        off += 1 + 12
    return SurfaceMesh(vertices, faces)


def export_curves_csv(mesh: SurfaceMesh, path: str) -> None:
    """Named boundary polylines as CSV rows (name, index, x1, x2, x3)."""
    if not mesh.boundary_polylines:
        raise MeshError("mesh has no named curves to export")
    try:
        with open(path, "w", encoding="ascii") as fh:
            for line in _metadata_header_lines(mesh):
                fh.write(f"# {line}\n")
            fh.write("name,index,x1,x2,x3\n")
            for name in sorted(mesh.boundary_polylines):
                poly = mesh.boundary_polylines[name]
                for i, p in enumerate(poly):
                    fh.write(f"{name},{i},{p[0]:.17g},{p[1]:.17g},{p[2]:.17g}\n")
    except OSError as exc:
        raise MeshError(f"curves export failed for {path!r}: {exc}") from exc
