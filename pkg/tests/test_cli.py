"""Command-line interface: subcommand contracts, exit codes, config-file
merging, provenance headers, and byte-identical reruns."""

import json

import numpy as np
import pytest

from g1helicoid.cli import RunConfig, UsageError, run

RHO0 = 0.7105219800457504
LAM0 = 0.5882995303657090
OVERRIDE = ["--rho", repr(RHO0), "--lambda", repr(LAM0)]


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        run(["--version"])
    assert exc.value.code == 0
    assert "g1helicoid" in capsys.readouterr().out


def test_help_exits_zero():
    with pytest.raises(SystemExit) as exc:
        run(["--help"])
    assert exc.value.code == 0


def test_unknown_flag_exits_2(capsys):
    assert run(["solve", "--no-such-flag"]) == 2
    assert "error" in capsys.readouterr().err


def test_missing_subcommand_exits_2():
    assert run([]) == 2


def test_solve_json_contract(tmp_path, capsys):
    out = tmp_path / "sol.json"
    assert run(["solve", "--out", str(out)]) == 0
    payload = json.loads(out.read_text())
    for key in (
        "provenance",
        "rho0",
        "lambda0",
        "Lambda0",
        "r",
        "R",
        "T",
        "residual_F",
        "residual_G",
    ):
        assert key in payload
    assert payload["rho0"] == pytest.approx(RHO0, abs=1e-10)
    assert payload["lambda0"] == pytest.approx(LAM0, abs=1e-10)
    assert abs(payload["residual_F"]) < 1e-9
    assert abs(payload["residual_G"]) < 1e-9
    prov = payload["provenance"]
    assert prov["artifact"] == "g1helicoid"
    assert prov["config"]["subcommand"] == "solve"
    assert prov["solution"]["rho0"] == payload["rho0"]


def test_solve_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["solve", "--out", str(a)]) == 0
    assert run(["solve", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_solve_stdout_matches_file(tmp_path, capsys):
    out = tmp_path / "sol.json"
    assert run(["solve", "--out", str(out)]) == 0
    capsys.readouterr()
    assert run(["solve"]) == 0
    assert capsys.readouterr().out == out.read_text()


def test_periods_row_count(tmp_path):
    out = tmp_path / "per.csv"
    assert run(["periods", "--rho-grid", "6", "--out", str(out)]) == 0
    lines = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert lines[0] == "rho,Lambda,F,G"
    assert len(lines) - 1 == 6
    for line in lines[1:]:
        rho, Lam, F, G = map(float, line.split(","))
        assert 2.0 < Lam < 8.0
        assert abs(F) < 1e-9  # each row solves the inner problem


def test_periods_provenance_header(tmp_path):
    out = tmp_path / "per.csv"
    assert run(["periods", "--rho-grid", "2", "--out", str(out)]) == 0
    text = out.read_text()
    assert text.startswith("# g1helicoid")
    assert "rho_grid=2" in text


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# a comment\nrho-grid = 3\nrho_min = 0.4\nrho-max = 1.0\n")
    out = tmp_path / "per.csv"
    assert run(["--config", str(cfg), "periods", "--out", str(out)]) == 0
    rows = [l for l in out.read_text().splitlines() if "," in l][1:]
    assert len(rows) == 3
    assert float(rows[0].split(",")[0]) == pytest.approx(0.4)
    assert float(rows[-1].split(",")[0]) == pytest.approx(1.0)


def test_flags_override_config(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("rho-grid = 3\n")
    out = tmp_path / "per.csv"
    assert run(["--config", str(cfg), "periods", "--rho-grid", "2", "--out", str(out)]) == 0
    rows = [l for l in out.read_text().splitlines() if "," in l][1:]
    assert len(rows) == 2


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("bogus = 1\n")
    assert run(["--config", str(cfg), "solve"]) == 2
    assert "unknown config key" in capsys.readouterr().err


def test_malformed_config_exits_2(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("resolution 16\n")
    assert run(["--config", str(cfg), "solve"]) == 2


def test_nonpositive_tolerance_exits_2():
    assert run(["solve", "--rel-tol", "-1e-9"]) == 2


def test_unwritable_out_exits_2():
    assert run(["solve", "--out", "/no/such/dir/x.json"]) == 2


def test_rho_without_lambda_exits_2(tmp_path):
    assert run(["mesh", "--rho", "0.7", "--out", str(tmp_path / "m.obj")]) == 2


def test_mesh_requires_out():
    assert run(["mesh"]) == 2


def test_domain_error_exits_1(tmp_path, capsys):
    rc = run(
        ["mesh", "--rho", "2.0", "--lambda", "0.5", "--out", str(tmp_path / "m.obj")]
    )
    assert rc == 1
    assert "numeric error" in capsys.readouterr().err


def test_mesh_obj_output(tmp_path):
    from g1helicoid.mesh import check_oriented_manifold, import_obj

    out = tmp_path / "m.obj"
    rc = run(["mesh", "--resolution", "16", *OVERRIDE, "--out", str(out)])
    assert rc == 0
    mesh = import_obj(str(out))
    assert len(mesh.vertices) > 1000
    rep = check_oriented_manifold(mesh)
    assert rep["misoriented_edges"] == 0
    header = [l for l in out.read_text().splitlines() if l.startswith("#")]
    assert any("g1helicoid" in l for l in header)  # provenance embedded


def test_mesh_ply_stack(tmp_path):
    from g1helicoid.mesh import import_ply

    out = tmp_path / "m.ply"
    rc = run(
        ["mesh", "--resolution", "16", "--copies", "2", "--format", "ply",
         *OVERRIDE, "--out", str(out)]
    )
    assert rc == 0
    mesh = import_ply(str(out))
    spread = mesh.vertices[:, 2].max() - mesh.vertices[:, 2].min()
    T = 2.5503397681180493
    assert spread == pytest.approx(2.0 * T, abs=1e-3 * T)


def test_curves_csv_output(tmp_path):
    out = tmp_path / "curves.csv"
    rc = run(["curves", "--resolution", "16", *OVERRIDE, "--out", str(out)])
    assert rc == 0
    body = [l for l in out.read_text().splitlines() if not l.startswith("#")]
    assert body[0] == "name,index,x1,x2,x3"
    names = {line.split(",")[0] for line in body[1:]}
    assert names == {"C", "E", "E_hat", "H1", "H2", "c", "end"}


def test_verify_exits_zero_at_solution(tmp_path, capsys):
    out = tmp_path / "report.json"
    rc = run(["verify", "--out", str(out)])
    assert rc == 0
    report = json.loads(out.read_text())
    assert report["provenance"]["config"]["subcommand"] == "verify"
    assert all(c["passed"] for c in report["checks"])
    # the human-readable table went to stdout
    assert "failures: 0" in capsys.readouterr().out


def test_runconfig_validation_direct():
    with pytest.raises(UsageError):
        RunConfig(subcommand="solve", grid=1).validate()
    with pytest.raises(UsageError):
        RunConfig(subcommand="mesh", format="stl").validate()
    with pytest.raises(UsageError):
        RunConfig(subcommand="solve", rho_min=0.9, rho_max=0.4).validate()
    RunConfig(subcommand="solve").validate()  # defaults are valid
