"""The two period integrals and the nested root solve that closes them.

For ``rho in (0, pi/2)`` and ``Lam in (2, min(2/sin rho, 8))`` define

    F(rho, Lam) = int_rho^{pi/2} (2 - Lam sin p)/(Lam - 2 sin p)
                                 * (sin p - sin rho)^{-1/2} dp
    G(rho, Lam) = int_{-pi/2}^rho (Lam - 4 sin rho + 2 sin p)/(Lam - 2 sin p)
                                 * (2 - Lam sin p)/(Lam - 2 sin p)
                                 * (sin rho - sin p)^{-1/2} dp

``F = 0`` closes the horizontal period across the vertical-symmetry curve and
implicitly defines ``Lam(rho)``; ``G(rho, Lam(rho)) = 0`` then closes the
remaining horizontal period and selects the surface parameters
``(rho0, lam0)``.  Both integrands have an inverse-square-root endpoint at
``p = rho`` which is evaluated cancellation-free via the endpoint-distance
protocol of :mod:`g1helicoid.quadrature`:

    sin p - sin rho = 2 cos(rho + da/2) sin(da/2),        da = p - rho
    sin rho - sin p = 2 cos(rho - db/2) sin(db/2),        db = rho - p

For ``Lam -> 2+`` the F-integrand develops a sharp (but bounded) boundary
layer at ``p = pi/2`` of width ``~sqrt(Lam - 2)``; the factors are written in
terms of ``db = pi/2 - p`` so the layer is resolved without cancellation and
the double-exponential rule clusters nodes there automatically.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import brentq

from .params import SurfaceParams, lambda_from_Lambda
from .quadrature import DEFAULT_SPEC, QuadratureResult, QuadratureSpec, integrate

__all__ = [
    "PeriodSolverError",
    "BracketSignError",
    "NoSignChangeError",
    "F_integral",
    "G_integral",
    "G_integrand_samples",
    "PeriodState",
    "evaluate_periods",
    "Lambda_upper_bound",
    "solve_Lambda_of_rho",
    "PeriodSolution",
    "solve_period_problem",
    "LambdaWindowReport",
    "Lambda_window_certificate",
]

# Quadrature policy for period integrals: a little tighter than the engine
# default because the outer root solves chase |G| < 1e-9.
PERIOD_SPEC = QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14, max_level=12)

# Relative inset of the Lambda bracket endpoints.
_BRACKET_INSET = 1e-6


class PeriodSolverError(RuntimeError):
    """Base class for period-solver failures."""


class BracketSignError(PeriodSolverError):
    """The F-bracket endpoints did not have the expected signs."""


class NoSignChangeError(PeriodSolverError):
    """The rho-scan of G(rho, Lambda(rho)) found no sign change."""

    def __init__(self, message: str, table: List[Tuple[float, float, float, float]]):
        super().__init__(message)
        self.table = table


def _check_rho_interior(rho: float) -> float:
    rho = float(rho)
    if not 0.0 < rho < math.pi / 2:
        raise PeriodSolverError(f"rho={rho!r} must lie in (0, pi/2) for the period integrals")
    return rho


def _f_integrand(rho: float, Lam: float) -> Callable:
    def f(p: np.ndarray, da: np.ndarray, db: np.ndarray) -> np.ndarray:
        # sin p - sin rho, stable at the singular endpoint p = rho
        sing = 2.0 * np.cos(rho + 0.5 * da) * np.sin(0.5 * da)
        # factors stable in the Lam -> 2+ boundary layer at p = pi/2
        s2 = np.sin(0.5 * db) ** 2
        num = (2.0 - Lam) + 2.0 * Lam * s2          # 2 - Lam sin p
        den = (Lam - 2.0) + 4.0 * s2                # Lam - 2 sin p
        return num / (den * np.sqrt(sing))

    return f


def _g_integrand(rho: float, Lam: float) -> Callable:
    sin_rho = math.sin(rho)

    def g(p: np.ndarray, da: np.ndarray, db: np.ndarray) -> np.ndarray:
        sing = 2.0 * np.cos(rho - 0.5 * db) * np.sin(0.5 * db)  # sin rho - sin p
        sp = np.sin(p)
        den = Lam - 2.0 * sp
        return (Lam - 4.0 * sin_rho + 2.0 * sp) * (2.0 - Lam * sp) / (den * den * np.sqrt(sing))

    return g


def F_integral(
    rho: float, Lam: float, spec: QuadratureSpec = PERIOD_SPEC
) -> QuadratureResult:
    """First period integral F(rho, Lam) with quadrature diagnostics."""
    rho = _check_rho_interior(rho)
    return integrate(_f_integrand(rho, float(Lam)), rho, math.pi / 2, spec)


def G_integral(
    rho: float, Lam: float, spec: QuadratureSpec = PERIOD_SPEC
) -> QuadratureResult:
    """Second period integral G(rho, Lam) with quadrature diagnostics.

    Defined for every ``rho in (-pi/2, pi/2)`` (the nonpositive-rho branch is
    used for diagnostics only).
    """
    rho = float(rho)
    if not -math.pi / 2 < rho < math.pi / 2:
        raise PeriodSolverError(f"rho={rho!r} outside (-pi/2, pi/2)")
    return integrate(_g_integrand(rho, float(Lam)), -math.pi / 2, rho, spec)


def G_integrand_samples(rho: float, Lam: float, n: int = 200) -> np.ndarray:
    """G-integrand values at ``n`` interior abscissae (sign diagnostics)."""
    rho = float(rho)
    p = np.linspace(-math.pi / 2, rho, n + 2)[1:-1]
    da = p + math.pi / 2
    db = rho - p
    return _g_integrand(rho, Lam)(p, da, db)


def Lambda_upper_bound(rho: float) -> float:
    """Upper end of the admissible Lambda range, ``min(2/sin rho, 8)``."""
    rho = _check_rho_interior(rho)
    s = math.sin(rho)
    return min(2.0 / s, 8.0) if s > 0 else 8.0


@dataclass(frozen=True)
class PeriodState:
    """Both period integrals at one (rho, Lambda), plus integrand landmarks.

    ``phi_Lambda`` solves ``sin(phi) = 2/Lambda`` (zero of the shared factor
    ``2 - Lam sin p``); ``phi_rho`` solves ``Lam - 4 sin rho + 2 sin p = 0``
    in (0, rho) when that zero exists, else None.
    """

    rho: float
    Lambda: float
    F: float
    G: float
    F_quad: QuadratureResult
    G_quad: QuadratureResult
    phi_Lambda: float
    phi_rho: Optional[float]


def _phi_Lambda(Lam: float) -> float:
    if Lam < 2.0:
        raise PeriodSolverError(f"phi_Lambda undefined for Lambda={Lam!r} < 2")
    return math.asin(min(1.0, 2.0 / Lam))


def _phi_rho(rho: float, Lam: float) -> Optional[float]:
    s = 0.5 * (4.0 * math.sin(rho) - Lam)
    if not 0.0 < s < math.sin(rho):
        return None
    return math.asin(s)


def evaluate_periods(
    rho: float, Lam: float, spec: QuadratureSpec = PERIOD_SPEC
) -> PeriodState:
    """Evaluate both period integrals and landmark angles at (rho, Lambda)."""
    fq = F_integral(rho, Lam, spec)
    gq = G_integral(rho, Lam, spec)
    return PeriodState(
        rho=float(rho),
        Lambda=float(Lam),
        F=fq.value,
        G=gq.value,
        F_quad=fq,
        G_quad=gq,
        phi_Lambda=_phi_Lambda(float(Lam)),
        phi_rho=_phi_rho(float(rho), float(Lam)),
    )


def solve_Lambda_of_rho(
    rho: float,
    spec: QuadratureSpec = PERIOD_SPEC,
    root_tol: float = 1e-13,
) -> float:
    """Solve ``F(rho, Lambda) = 0`` for Lambda on its validated bracket.

    The bracket is ``(2 + eps, min(2/sin rho, 8) - eps)`` with
    ``eps = 1e-6 * width``.  The endpoint signs are checked (F > 0 at the
    lower end, F < 0 at the upper end) and a :class:`BracketSignError` is
    raised loudly on mismatch rather than guessing.
    """
    rho = _check_rho_interior(rho)
    upper = Lambda_upper_bound(rho)
    width = upper - 2.0
    if width <= 0:
        raise PeriodSolverError(f"empty Lambda bracket at rho={rho!r}")
    eps = _BRACKET_INSET * width
    lo, hi = 2.0 + eps, upper - eps

    f_lo = F_integral(rho, lo, spec).value
    f_hi = F_integral(rho, hi, spec).value
    if not (f_lo > 0.0 and f_hi < 0.0):
        raise BracketSignError(
            f"F-bracket signs invalid at rho={rho!r}: "
            f"F({lo!r})={f_lo!r} (expected > 0), F({hi!r})={f_hi!r} (expected < 0)"
        )
    return float(
        brentq(
            lambda L: F_integral(rho, L, spec).value,
            lo,
            hi,
            xtol=root_tol,
            rtol=8.0 * np.finfo(float).eps,
        )
    )


@dataclass(frozen=True)
class PeriodSolution:
    """Result of the nested period solve."""

    params: SurfaceParams
    rho0: float
    lambda0: float
    Lambda0: float
    residual_F: float
    residual_G: float
    sign_changes: List[Tuple[float, float]]
    table: List[Tuple[float, float, float, float]]  # (rho, Lambda(rho), F, G)
    bracket_used: Tuple[float, float]


def _scan_row(
    rho: float, spec: QuadratureSpec, root_tol: float
) -> Tuple[float, float, float, float]:
    Lam = solve_Lambda_of_rho(rho, spec, root_tol)
    st = evaluate_periods(rho, Lam, spec)
    return (rho, Lam, st.F, st.G)


def scan_H(
    rho_grid: Sequence[float],
    spec: QuadratureSpec = PERIOD_SPEC,
    root_tol: float = 1e-13,
    threads: Optional[int] = None,
) -> List[Tuple[float, float, float, float]]:
    """Rows ``(rho, Lambda(rho), F, G)`` over a rho grid (order-preserving).

    The grid is embarrassingly parallel; results are gathered by index so the
    output is deterministic regardless of thread count.
    """
    rhos = [float(r) for r in rho_grid]
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda r: _scan_row(r, spec, root_tol), rhos))
    else:
        rows = [_scan_row(r, spec, root_tol) for r in rhos]
    return rows


def solve_period_problem(
    spec: QuadratureSpec = PERIOD_SPEC,
    grid_size: int = 64,
    root_tol: float = 1e-12,
    rho_min: float = 0.02,
    rho_max: float = math.pi / 2 - 0.02,
    threads: Optional[int] = None,
) -> PeriodSolution:
    """Solve both period conditions; returns the closed parameter set.

    A ``grid_size``-point scan of ``H(rho) = G(rho, Lambda(rho))`` over
    ``(rho_min, rho_max)`` locates every sign change (all are reported; no
    uniqueness is asserted).  The first bracket is refined with a bracketed
    root solve to ``root_tol`` in rho.

    Raises
    ------
    NoSignChangeError
        If the scan finds no sign change; the sampled table is attached to
        the exception for inspection.
    """
    grid = np.linspace(rho_min, rho_max, int(grid_size))
    table = scan_H(grid, spec, threads=threads)

    g_vals = [row[3] for row in table]
    sign_changes: List[Tuple[float, float]] = []
    for i in range(len(table) - 1):
        if g_vals[i] == 0.0 or (g_vals[i] < 0.0) != (g_vals[i + 1] < 0.0):
            sign_changes.append((table[i][0], table[i + 1][0]))
    if not sign_changes:
        raise NoSignChangeError(
            f"no sign change of G(rho, Lambda(rho)) on ({rho_min}, {rho_max}) "
            f"with {grid_size} samples",
            table,
        )

    lo, hi = sign_changes[0]

    def H(rho: float) -> float:
        Lam = solve_Lambda_of_rho(rho, spec, root_tol=1e-13)
        return G_integral(rho, Lam, spec).value

    rho0 = float(brentq(H, lo, hi, xtol=root_tol, rtol=8.0 * np.finfo(float).eps))
    Lambda0 = solve_Lambda_of_rho(rho0, spec, root_tol=1e-14)
    lambda0 = lambda_from_Lambda(Lambda0)
    state = evaluate_periods(rho0, Lambda0, spec)
    params = SurfaceParams.create(rho0, lambda0)
    return PeriodSolution(
        params=params,
        rho0=rho0,
        lambda0=lambda0,
        Lambda0=Lambda0,
        residual_F=state.F,
        residual_G=state.G,
        sign_changes=sign_changes,
        table=table,
        bracket_used=(lo, hi),
    )


@dataclass(frozen=True)
class LambdaWindowReport:
    """Bounds certificate for the inner solve ``Lambda(rho)``.

    Per grid point: ``2 < Lambda(rho) < min(2/sin rho, 8)`` and
    ``F(rho, 8) < 0`` whenever 8 is inside the admissible range.  Near the
    upper end of the rho interval the sharper bound
    ``Lambda(rho) < 2 + (1 - sin rho)`` is certified by the sign
    ``F(rho, 2 + (1 - sin rho)) < 0``.  Two closed-form constants used by the
    underlying monotonicity estimates are recomputed:

    ``tail_bound_constant``  = sqrt(2)/3 - 1/2            (< 0)
    ``large_Lambda_constant``= (1/2) sqrt(1/3.75) - (1/2) sqrt(15/16)  (< 0)
    """

    rows: List[dict]
    all_bounds_hold: bool
    tail_bound_constant: float
    large_Lambda_constant: float


def Lambda_window_certificate(
    rho_grid: Optional[Sequence[float]] = None,
    spec: QuadratureSpec = PERIOD_SPEC,
) -> LambdaWindowReport:
    """Certify the Lambda(rho) bounds on a rho grid (default 64 points).

    ``F(rho, 8)`` is well defined for every rho (the integrand denominator
    ``Lam - 2 sin p >= 6`` there), and its negativity certifies
    ``Lambda(rho) < 8`` via the strict Lambda-decrease of F.
    """
    if rho_grid is None:
        rho_grid = np.linspace(0.02, math.pi / 2 - 0.02, 64)
    rows: List[dict] = []
    ok = True
    for rho in rho_grid:
        rho = float(rho)
        upper = Lambda_upper_bound(rho)
        Lam = solve_Lambda_of_rho(rho, spec)
        row = {
            "rho": rho,
            "Lambda": Lam,
            "upper": upper,
            "in_range": 2.0 < Lam < upper,
            "F_at_8": F_integral(rho, 8.0, spec).value,
            "near_top_bound": None,
        }
        row["F_at_8_negative"] = row["F_at_8"] < 0.0
        ok &= row["F_at_8_negative"]
        if rho > 1.4:
            sharp = 2.0 + (1.0 - math.sin(rho))
            if sharp < upper:
                f_sharp = F_integral(rho, sharp, spec).value
                row["near_top_bound"] = {
                    "Lambda_bound": sharp,
                    "F_at_bound": f_sharp,
                    "holds": Lam < sharp and f_sharp < 0.0,
                }
                ok &= row["near_top_bound"]["holds"]
        ok &= row["in_range"]
        rows.append(row)
    tail_const = math.sqrt(2.0) / 3.0 - 0.5
    big_const = 0.5 * math.sqrt(0.25 / (1.0 - 1.0 / 16.0)) - 0.5 * math.sqrt(1.0 - 1.0 / 16.0)
    ok &= tail_const < 0.0 and big_const < 0.0
    return LambdaWindowReport(
        rows=rows,
        all_bounds_hold=bool(ok),
        tail_bound_constant=tail_const,
        large_Lambda_constant=big_const,
    )
