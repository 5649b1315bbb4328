import json
import subprocess
import sys

import numpy as np
import pytest

from finmin.cli import main, read_grid_csv
from finmin.translation import kl_ratio_derivative


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, json.loads(out)


def run_proc(argv):
    return subprocess.run(
        [sys.executable, "-m", "finmin", *argv], capture_output=True, text=True
    )


# ---------------------------------------------------------------------------
# volume


def test_volume_record(capsys):
    code, rec = run_json(capsys, ["volume", "--b", "0.3", "--n", "2", "--family", "matsumoto", "--no-timestamp"])
    assert code == 0
    assert rec["command"] == "volume"
    entry = rec["results"][0]
    assert entry["quadrature"] == pytest.approx(0.9569377990430622, abs=1e-12)
    assert entry["closed"] == pytest.approx(0.9569377990430622, rel=1e-15)
    assert entry["abs_diff"] <= 1e-10
    assert entry["euclidean_degeneration"] is False


def test_volume_sweep_and_degeneration_flag(capsys):
    code, rec = run_json(capsys, ["volume", "--b", "0,0.2,0.4", "--no-timestamp"])
    assert code == 0
    assert [e["b"] for e in rec["results"]] == [0.0, 0.2, 0.4]
    assert rec["results"][0]["euclidean_degeneration"] is True


def test_volume_rejects_bad_b(capsys):
    assert main(["volume", "--b", "0.6", "--no-timestamp"]) == 2
    err = capsys.readouterr().err
    assert "outside" in err


def test_timestamp_present_by_default(capsys):
    code, rec = run_json(capsys, ["volume", "--b", "0.1"])
    assert code == 0
    assert "timestamp" in rec


# ---------------------------------------------------------------------------
# residual commands


def test_residual_graph_trivial(capsys):
    code, rec = run_json(
        capsys,
        ["residual-graph", "--b", "0", "--point", "f1=0,f2=0,h11=0,h12=0,h22=0", "--no-timestamp"],
    )
    assert code == 0
    assert rec["results"][0]["residual"] == 0.0
    assert rec["results"][0]["euclidean_degeneration"] is True


def test_residual_graph_bad_point(capsys):
    assert main(["residual-graph", "--point", "f1=0,f2=0", "--no-timestamp"]) == 2
    assert main(["residual-graph", "--point", "bogus=1", "--no-timestamp"]) == 2


def test_residual_translation(capsys):
    code, rec = run_json(
        capsys,
        ["residual-translation", "--b", "0,0.3", "--point", "fp=1,fpp=0.5,gp=2,gpp=-0.25", "--no-timestamp"],
    )
    assert code == 0
    e0 = rec["results"][0]
    assert e0["lambda"] == pytest.approx(4.0 * 36.0 * 5.0)  # 4 (1+p)^2 (1+s)
    assert e0["residual"] == pytest.approx(e0["lambda"] * 0.5 + e0["mu"] * -0.25)


# ---------------------------------------------------------------------------
# check commands


def test_check_derivatives_small(capsys):
    code, rec = run_json(
        capsys,
        ["check-derivatives", "--b", "0,0.4", "--samples", "10", "--seed", "3", "--no-timestamp"],
    )
    assert code == 0
    for entry in rec["results"]:
        assert entry["pass"] is True
        assert entry["max_rel_errors"]["grad_dual"] <= 1e-9
        assert entry["max_rel_errors"]["hess_central"] <= 1e-6


def test_check_derivatives_forced_failure(capsys):
    code, rec = run_json(
        capsys,
        [
            "check-derivatives",
            "--b",
            "0.2",
            "--samples",
            "5",
            "--rtol-dual",
            "1e-30",
            "--no-timestamp",
        ],
    )
    assert code == 4
    assert rec["results"][0]["pass"] is False


def test_check_translation_report(capsys):
    code, rec = run_json(
        capsys,
        ["check-translation", "--b2", "0,1/100,9/100", "--p", "0,1/2,1,2", "--no-timestamp"],
    )
    assert code == 0
    assert rec["message"] == "(K/L)_p = 1 at all nodes; rigidity criterion satisfied only at b=0"
    first = rec["results"][0]
    assert first["b2"] == "0/1"
    assert all(node["value"] == "1" or node["value"] == "1/1" for node in first["ratio_derivative"])
    assert first["admits_nonplanar"] is True
    second = rec["results"][1]
    assert second["admits_nonplanar"] is False
    # serialized exact rationals match the library values
    v = kl_ratio_derivative("1/100", 0)
    assert second["ratio_derivative"][0]["value"] == f"{v.numerator}/{v.denominator}"


def test_ellipticity_command(capsys):
    code, rec = run_json(
        capsys,
        ["ellipticity", "--b", "0,0.3", "--samples", "500", "--seed", "1", "--tmax", "100", "--no-timestamp"],
    )
    assert code == 0
    for entry in rec["results"]:
        assert entry["pass"] is True
        assert entry["min_quadform_ratio"] >= 1.0 - 1e-12
        assert entry["min_divisor"] > 0.0


# ---------------------------------------------------------------------------
# solve + grid files


def test_solve_writes_roundtrip_grid(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    code, rec = run_json(
        capsys,
        [
            "solve",
            "--b",
            "0.2",
            "--boundary",
            "affine:0.1,0.3,0.2",
            "--nx",
            "15",
            "--ny",
            "15",
            "--out",
            str(out),
            "--no-timestamp",
        ],
    )
    assert code == 0
    assert rec["planarity_deviation"] < 1e-8
    xs, ys, f = read_grid_csv(out)
    assert f.shape == (17, 17)
    expected = 0.1 + 0.3 * xs[:, None] + 0.2 * ys[None, :]
    assert np.max(np.abs(f - expected)) < 1e-8

    # the reloaded field is bit-equal to an identical in-process solve
    from finmin.solver import GridProblem, solve_minimal_graph

    problem = GridProblem(
        (-1.0, 1.0, -1.0, 1.0), 15, 15, 0.2, lambda x, y: 0.1 + 0.3 * x + 0.2 * y
    )
    sol = solve_minimal_graph(problem, tol=1e-10)
    assert np.array_equal(f, sol.f)

    from finmin.cli import write_grid_csv

    out2 = tmp_path / "grid2.csv"
    write_grid_csv(out2, xs, ys, f)
    xs2, ys2, f2 = read_grid_csv(out2)
    assert np.array_equal(xs, xs2) and np.array_equal(ys, ys2) and np.array_equal(f, f2)


def test_solve_scherk_domain_validation(capsys):
    code = main(
        ["solve", "--b", "0", "--boundary", "scherk", "--domain=-2,2,-1,1", "--no-timestamp"]
    )
    assert code == 2
    assert "pi/2" in capsys.readouterr().err


def test_solve_non_convergence_exit(capsys):
    code = main(
        [
            "solve",
            "--b",
            "0.3",
            "--boundary",
            "scherk",
            "--nx",
            "15",
            "--ny",
            "15",
            "--max-iter",
            "1",
            "--no-timestamp",
        ]
    )
    assert code == 3
    assert "Newton" in capsys.readouterr().err


def test_solve_unknown_boundary(capsys):
    assert main(["solve", "--boundary", "wavy", "--no-timestamp"]) == 2


# ---------------------------------------------------------------------------
# process-level behavior


def test_usage_error_names_offending_token():
    proc = run_proc(["volume", "--bogus-flag", "1"])
    assert proc.returncode == 2
    assert "--bogus-flag" in proc.stderr


def test_unknown_command_exits_2():
    proc = run_proc(["frobnicate"])
    assert proc.returncode == 2
    assert "frobnicate" in proc.stderr


def test_byte_identical_determinism():
    argv = ["check-derivatives", "--b", "0.2", "--samples", "8", "--seed", "7", "--no-timestamp"]
    a = run_proc(argv)
    b = run_proc(argv)
    assert a.returncode == b.returncode == 0
    assert a.stdout == b.stdout
    argv2 = ["ellipticity", "--b", "0.25", "--samples", "200", "--seed", "11", "--tmax", "50", "--no-timestamp"]
    a2 = run_proc(argv2)
    b2 = run_proc(argv2)
    assert a2.stdout == b2.stdout
