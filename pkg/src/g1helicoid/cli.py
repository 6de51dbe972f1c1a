"""Command-line front end.

One executable, five subcommands::

    g1helicoid solve    # solve both period conditions, print the closed
                        # parameter set as JSON
    g1helicoid periods  # CSV table (rho, Lambda(rho), F, G) over a rho grid
    g1helicoid mesh     # triangle mesh of the surface (OBJ or PLY)
    g1helicoid curves   # CSV dump of the distinguished boundary curves
    g1helicoid verify   # run the verification suite; nonzero exit on failure

Behaviour shared by every subcommand:

* a flat ``KEY = VALUE`` config file (``--config``) supplies defaults;
  explicit flags override it; unknown keys are rejected,
* every output carries a provenance header (artifact version, the exact
  configuration used, and the solved parameters when applicable),
* floating-point output uses 17 significant digits, so reruns with the same
  configuration are byte-identical,
* exit 0 on success, 2 on usage/config errors, 1 on numeric failures.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, fields
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .mesh import (
    MeshError,
    SurfaceMesh,
    assemble_fundamental_domain,
    export_curves_csv,
    export_obj,
    export_ply,
    mesh_patch_D,
    stack_periods,
)
from .params import ParameterDomainError, SurfaceParams
from .period_solver import PeriodSolverError, scan_H, solve_period_problem
from .quadrature import QuadratureError, QuadratureSpec
from .verify import json_text, run_all
from .weierstrass import IntegrationError

__all__ = ["RunConfig", "UsageError", "run", "main"]

#: Exceptions that signal a *numeric* failure (exit code 1), as opposed to a
#: usage error (exit code 2).
NUMERIC_ERRORS = (
    ParameterDomainError,
    QuadratureError,
    PeriodSolverError,
    IntegrationError,
    MeshError,
    FloatingPointError,
    ZeroDivisionError,
)


class UsageError(ValueError):
    """Bad flags, bad config file, or an unwritable output path (exit 2)."""


# --------------------------------------------------------------------------
# configuration
# --------------------------------------------------------------------------

_RHO_MAX_DEFAULT = math.pi / 2 - 0.02


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved configuration for one CLI run.

    Defaults live here (not in argparse) so that the merge order is
    explicit: built-in default < config file < command-line flag.
    """

    subcommand: str
    # quadrature overrides (periods / solve / verify)
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    max_level: int = 12
    # period solver
    grid: int = 64
    root_tol: float = 1e-12
    rho_min: float = 0.02
    rho_max: float = _RHO_MAX_DEFAULT
    # periods table
    rho_grid: int = 32
    # mesh / curves
    resolution: int = 48
    copies: int = 1
    cutoff: float = 1e-2
    format: str = "obj"
    rho: Optional[float] = None
    lam: Optional[float] = None
    # verify
    verify_grid: int = 100
    # common
    threads: Optional[int] = None
    seed: int = 0
    config_path: Optional[str] = None
    out: Optional[str] = None

    def validate(self) -> None:
        if self.rel_tol <= 0 or self.abs_tol <= 0 or self.root_tol <= 0:
            raise UsageError("tolerances must be positive")
        if self.cutoff <= 0:
            raise UsageError("cutoff must be positive")
        if self.max_level < 1:
            raise UsageError("max-level must be >= 1")
        if self.grid < 2:
            raise UsageError("grid must be >= 2")
        if self.rho_grid < 1:
            raise UsageError("rho-grid must be >= 1")
        if not (0.0 < self.rho_min < self.rho_max < math.pi / 2):
            raise UsageError("need 0 < rho-min < rho-max < pi/2")
        if self.resolution < 8:
            raise UsageError("resolution must be >= 8")
        if self.copies < 1:
            raise UsageError("copies must be >= 1")
        if self.format not in ("obj", "ply"):
            raise UsageError(f"unknown mesh format {self.format!r}")
        if self.verify_grid < 4:
            raise UsageError("verify grid must be >= 4")
        if self.threads is not None and self.threads < 1:
            raise UsageError("threads must be >= 1")
        if (self.rho is None) != (self.lam is None):
            raise UsageError("--rho and --lambda must be given together")
        if self.out is not None:
            parent = os.path.dirname(os.path.abspath(self.out))
            if not os.path.isdir(parent):
                raise UsageError(f"output directory does not exist: {parent}")
            if not os.access(parent, os.W_OK):
                raise UsageError(f"output directory is not writable: {parent}")

    def quad_spec(self) -> QuadratureSpec:
        return QuadratureSpec(
            rel_tol=self.rel_tol, abs_tol=self.abs_tol, max_level=self.max_level
        )

    def echo(self) -> Dict[str, object]:
        """Deterministic key/value echo of everything that shaped the run."""
        keep = {
            "solve": (
                "rel_tol abs_tol max_level grid root_tol rho_min rho_max threads seed"
            ),
            "periods": (
                "rel_tol abs_tol max_level root_tol rho_grid rho_min rho_max"
                " threads seed"
            ),
            "mesh": (
                "rel_tol abs_tol max_level grid root_tol resolution copies cutoff"
                " format rho lam threads seed"
            ),
            "curves": (
                "rel_tol abs_tol max_level grid root_tol resolution cutoff rho lam"
                " threads seed"
            ),
            "verify": (
                "rel_tol abs_tol max_level grid root_tol verify_grid resolution"
                " cutoff threads seed"
            ),
        }[self.subcommand]
        out: Dict[str, object] = {"subcommand": self.subcommand}
        for name in keep.split():
            out[name] = getattr(self, name)
        return out


#: config-file / flag names (with ``-`` mapped to ``_``) accepted per field.
_FIELD_TYPES: Dict[str, type] = {
    "rel_tol": float,
    "abs_tol": float,
    "max_level": int,
    "grid": int,
    "root_tol": float,
    "rho_min": float,
    "rho_max": float,
    "rho_grid": int,
    "resolution": int,
    "copies": int,
    "cutoff": float,
    "format": str,
    "rho": float,
    "lam": float,
    "verify_grid": int,
    "threads": int,
    "seed": int,
    "out": str,
}


def _parse_config_file(path: str) -> Dict[str, str]:
    """Flat ``KEY = VALUE`` file; ``#`` comments; unknown keys rejected."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    entries: Dict[str, str] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected KEY = VALUE, got {raw.strip()!r}")
        key, value = line.split("=", 1)
        key = key.strip().replace("-", "_")
        if key == "lambda":  # reserved word; the dataclass field is `lam`
            key = "lam"
        if key not in _FIELD_TYPES:
            raise UsageError(f"{path}:{lineno}: unknown config key {key!r}")
        if key in entries:
            raise UsageError(f"{path}:{lineno}: duplicate config key {key!r}")
        entries[key] = value.strip()
    return entries


def _coerce(key: str, text: str) -> object:
    typ = _FIELD_TYPES[key]
    try:
        if typ is int:
            return int(text)
        if typ is float:
            return float(text)
        return text
    except ValueError as exc:
        raise UsageError(f"config key {key!r}: cannot parse {text!r} as {typ.__name__}") from exc


def _merge(args: argparse.Namespace) -> RunConfig:
    """Built-in defaults < config file < explicit flags, then validate."""
    file_values: Dict[str, object] = {}
    if args.config is not None:
        for key, text in _parse_config_file(args.config).items():
            file_values[key] = _coerce(key, text)

    values: Dict[str, object] = {
        "subcommand": args.subcommand,
        "config_path": args.config,
    }
    field_names = {f.name for f in fields(RunConfig)}
    for key in _FIELD_TYPES:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            values[key] = flag_value
        elif key in file_values:
            values[key] = file_values[key]
    values = {k: v for k, v in values.items() if k in field_names}
    cfg = RunConfig(**values)
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# argument parser
# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of calling sys.exit."""

    def error(self, message: str):  # noqa: D102 - argparse hook
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="g1helicoid",
        description=(
            "Numerical construction of the singly periodic genus-one helicoid:"
            " period solve, parameter tables, surface meshes, boundary curves,"
            " and a verification suite."
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--config", metavar="FILE", help="flat KEY = VALUE config file")
    parser.add_argument("--threads", type=int, metavar="N",
                        help="worker threads (default: hardware count)")
    parser.add_argument("--seed", type=int, metavar="N",
                        help="random seed recorded in provenance (sampling is "
                             "deterministic; reserved for future stochastic checks)")
    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
    sub.required = True

    def add_quadrature(p: argparse.ArgumentParser) -> None:
        p.add_argument("--rel-tol", dest="rel_tol", type=float, metavar="X",
                       help="quadrature relative tolerance (default 1e-12)")
        p.add_argument("--abs-tol", dest="abs_tol", type=float, metavar="X",
                       help="quadrature absolute tolerance (default 1e-14)")
        p.add_argument("--max-level", dest="max_level", type=int, metavar="N",
                       help="max quadrature refinement level (default 12)")

    def add_solver(p: argparse.ArgumentParser) -> None:
        p.add_argument("--grid", type=int, metavar="N",
                       help="scan grid size for the outer root (default 64)")
        p.add_argument("--root-tol", dest="root_tol", type=float, metavar="X",
                       help="root tolerance in rho (default 1e-12)")

    def add_out(p: argparse.ArgumentParser, required: bool = False) -> None:
        p.add_argument("--out", metavar="PATH", required=required,
                       help="output file" + ("" if required else " (default: stdout)"))

    p_solve = sub.add_parser("solve", help="solve both period conditions (JSON)")
    add_quadrature(p_solve)
    add_solver(p_solve)
    p_solve.add_argument("--rho-min", dest="rho_min", type=float, metavar="X",
                         help="lower end of the rho scan (default 0.02)")
    p_solve.add_argument("--rho-max", dest="rho_max", type=float, metavar="X",
                         help="upper end of the rho scan (default pi/2 - 0.02)")
    add_out(p_solve)

    p_per = sub.add_parser("periods", help="CSV table (rho, Lambda, F, G) over a rho grid")
    add_quadrature(p_per)
    p_per.add_argument("--rho-grid", dest="rho_grid", type=int, metavar="N",
                       help="number of rho samples (default 32)")
    p_per.add_argument("--rho-min", dest="rho_min", type=float, metavar="X",
                       help="first rho sample (default 0.02)")
    p_per.add_argument("--rho-max", dest="rho_max", type=float, metavar="X",
                       help="last rho sample (default pi/2 - 0.02)")
    p_per.add_argument("--root-tol", dest="root_tol", type=float, metavar="X",
                       help="tolerance of the per-row root solve (default 1e-12)")
    add_out(p_per)

    p_mesh = sub.add_parser("mesh", help="triangle mesh of the surface (OBJ or PLY)")
    add_quadrature(p_mesh)
    add_solver(p_mesh)
    p_mesh.add_argument("--resolution", type=int, metavar="N",
                        help="angular resolution of the patch (default 48)")
    p_mesh.add_argument("--copies", type=int, metavar="K",
                        help="number of vertical periods to stack (default 1)")
    p_mesh.add_argument("--cutoff", type=float, metavar="X",
                        help="puncture cutoff radius on the conformal disk (default 1e-2)")
    p_mesh.add_argument("--format", choices=("obj", "ply"),
                        help="mesh file format (default obj)")
    p_mesh.add_argument("--rho", type=float, metavar="X",
                        help="expert override: mesh at this rho instead of solving "
                             "(requires --lambda)")
    p_mesh.add_argument("--lambda", dest="lam", type=float, metavar="X",
                        help="expert override: mesh at this lambda (requires --rho)")
    add_out(p_mesh, required=True)

    p_cur = sub.add_parser("curves", help="CSV dump of the distinguished boundary curves")
    add_quadrature(p_cur)
    add_solver(p_cur)
    p_cur.add_argument("--resolution", type=int, metavar="N",
                       help="angular resolution of the patch (default 48)")
    p_cur.add_argument("--cutoff", type=float, metavar="X",
                       help="puncture cutoff radius on the conformal disk (default 1e-2)")
    p_cur.add_argument("--rho", type=float, metavar="X",
                       help="expert override: use this rho instead of solving "
                            "(requires --lambda)")
    p_cur.add_argument("--lambda", dest="lam", type=float, metavar="X",
                       help="expert override: use this lambda (requires --rho)")
    add_out(p_cur, required=True)

    p_ver = sub.add_parser("verify", help="run the verification suite")
    add_quadrature(p_ver)
    add_solver(p_ver)
    p_ver.add_argument("--verify-grid", dest="verify_grid", type=int, metavar="N",
                       help="side of the planar sampling grid (default 100)")
    p_ver.add_argument("--resolution", type=int, metavar="N",
                       help="angular resolution of the shared patch (default 48)")
    p_ver.add_argument("--cutoff", type=float, metavar="X",
                       help="puncture cutoff radius (default 1e-2)")
    add_out(p_ver)

    return parser


# --------------------------------------------------------------------------
# provenance + output helpers
# --------------------------------------------------------------------------


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def _provenance(cfg: RunConfig, solution: Optional[Dict[str, float]] = None) -> Dict[str, object]:
    prov: Dict[str, object] = {
        "artifact": "g1helicoid",
        "version": __version__,
        "config": cfg.echo(),
    }
    if solution is not None:
        prov["solution"] = solution
    return prov


def _provenance_comment_lines(cfg: RunConfig,
                              solution: Optional[Dict[str, float]] = None) -> List[str]:
    lines = [f"g1helicoid {__version__}"]
    echo = cfg.echo()
    parts = []
    for key, value in echo.items():
        if isinstance(value, float):
            parts.append(f"{key}={_g17(value)}")
        else:
            parts.append(f"{key}={value}")
    lines.append("config: " + " ".join(parts))
    if solution is not None:
        lines.append(
            "solution: "
            + " ".join(f"{k}={_g17(v)}" for k, v in solution.items())
        )
    return lines


def _emit_text(cfg: RunConfig, text: str) -> None:
    """Write to --out when given, otherwise to stdout."""
    if cfg.out is None:
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _solve(cfg: RunConfig):
    return solve_period_problem(
        spec=cfg.quad_spec(),
        grid_size=cfg.grid,
        root_tol=cfg.root_tol,
        rho_min=cfg.rho_min,
        rho_max=cfg.rho_max,
        threads=cfg.threads,
    )


def _resolve_params(cfg: RunConfig) -> Tuple[SurfaceParams, Dict[str, float]]:
    """Solve unless an explicit (rho, lambda) override was given."""
    if cfg.rho is not None and cfg.lam is not None:
        params = SurfaceParams.create(cfg.rho, cfg.lam)
        triple = {"rho0": params.rho, "lambda0": params.lam, "T": params.T}
        return params, triple
    sol = _solve(cfg)
    triple = {"rho0": sol.rho0, "lambda0": sol.lambda0, "T": sol.params.T}
    return sol.params, triple


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------


def _cmd_solve(cfg: RunConfig) -> int:
    sol = _solve(cfg)
    p = sol.params
    payload = {
        "provenance": _provenance(
            cfg, {"rho0": sol.rho0, "lambda0": sol.lambda0, "T": p.T}
        ),
        "rho0": sol.rho0,
        "lambda0": sol.lambda0,
        "Lambda0": sol.Lambda0,
        "r": p.r,
        "R": p.R,
        "T": p.T,
        "residual_F": sol.residual_F,
        "residual_G": sol.residual_G,
    }
    _emit_text(cfg, json_text(payload) + "\n")
    return 0


def _cmd_periods(cfg: RunConfig) -> int:
    if cfg.rho_grid == 1:
        rhos = [cfg.rho_min]
    else:
        rhos = list(np.linspace(cfg.rho_min, cfg.rho_max, cfg.rho_grid))
    rows = scan_H(rhos, cfg.quad_spec(), cfg.root_tol, cfg.threads)
    lines = ["# " + s for s in _provenance_comment_lines(cfg)]
    lines.append("rho,Lambda,F,G")
    for rho, Lam, F, G in rows:
        lines.append(",".join(_g17(v) for v in (rho, Lam, F, G)))
    _emit_text(cfg, "\n".join(lines) + "\n")
    return 0


def _build_patch(cfg: RunConfig, params: SurfaceParams,
                 triple: Dict[str, float]) -> SurfaceMesh:
    patch = mesh_patch_D(
        params,
        resolution=cfg.resolution,
        cutoff=cfg.cutoff,
        threads=cfg.threads,
    )
    patch.metadata["provenance"] = _provenance_comment_lines(cfg, triple)
    return patch


def _cmd_mesh(cfg: RunConfig) -> int:
    params, triple = _resolve_params(cfg)
    patch = _build_patch(cfg, params, triple)
    mesh = assemble_fundamental_domain(patch)
    if cfg.copies > 1:
        mesh = stack_periods(mesh, cfg.copies)
    mesh.metadata["provenance"] = _provenance_comment_lines(cfg, triple)
    if cfg.format == "ply":
        export_ply(mesh, cfg.out)
    else:
        export_obj(mesh, cfg.out)
    sys.stdout.write(
        f"wrote {cfg.out}: {len(mesh.vertices)} vertices, {len(mesh.faces)} faces"
        f" ({cfg.copies} period{'s' if cfg.copies != 1 else ''})\n"
    )
    return 0


def _cmd_curves(cfg: RunConfig) -> int:
    params, triple = _resolve_params(cfg)
    patch = _build_patch(cfg, params, triple)
    export_curves_csv(patch, cfg.out)
    names = ", ".join(sorted(patch.boundary_polylines))
    sys.stdout.write(f"wrote {cfg.out}: curves {names}\n")
    return 0


def _cmd_verify(cfg: RunConfig) -> int:
    report = run_all(
        grid=cfg.verify_grid,
        resolution=cfg.resolution,
        cutoff=cfg.cutoff,
        quad_spec=cfg.quad_spec(),
        threads=cfg.threads,
    )
    triple = {"rho0": report.rho0, "lambda0": report.lambda0, "T": report.T}
    payload = dict(report.to_dict())
    payload = {"provenance": _provenance(cfg, triple), **payload}
    text = json_text(payload) + "\n"
    if cfg.out is not None:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
        sys.stdout.write("\n")
    sys.stdout.write(report.table() + "\n")
    n_bad = report.n_failed
    if n_bad:
        sys.stderr.write(f"verification FAILED: {n_bad} check(s)\n")
        return 1
    return 0


_DISPATCH = {
    "solve": _cmd_solve,
    "periods": _cmd_periods,
    "mesh": _cmd_mesh,
    "curves": _cmd_curves,
    "verify": _cmd_verify,
}


# --------------------------------------------------------------------------
# entry points
# --------------------------------------------------------------------------


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Parse ``argv``, execute the subcommand, and return the exit code.

    0 = success, 1 = numeric failure (with a diagnostic on stderr),
    2 = usage or configuration error.
    """
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = _merge(args)
    except UsageError as exc:
        sys.stderr.write(f"g1helicoid: error: {exc}\n")
        sys.stderr.write("run 'g1helicoid --help' for usage\n")
        return 2
    try:
        return _DISPATCH[cfg.subcommand](cfg)
    except NUMERIC_ERRORS as exc:
        sys.stderr.write(f"g1helicoid: numeric error: {type(exc).__name__}: {exc}\n")
        return 1


def main(argv: Optional[Sequence[str]] = None) -> int:
    return run(argv)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
