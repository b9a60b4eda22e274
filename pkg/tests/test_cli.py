import json

import numpy as np
import pytest

from monotone_nash.cli import main
from monotone_nash.experiment import RUNS_HEADER, read_runs_csv


# --- check-schedule ------------------------------------------------------------


def test_check_schedule_accepts_default_exponents(capsys):
    assert main(["check-schedule", "5/9", "5/27", "1/27"]) == 0
    out = capsys.readouterr().out
    assert "all conditions hold" in out


def test_check_schedule_rejects_half(capsys):
    assert main(["check-schedule", "0.5", "0.125", "0.125"]) == 1
    out = capsys.readouterr().out
    assert "a > 1/2" in out
    assert "FAIL" in out


def test_check_schedule_rejects_large_a():
    assert main(["check-schedule", "0.9", "0.2", "0.1"]) == 1


def test_check_schedule_non_numeric_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["check-schedule", "abc", "1", "2"])
    assert info.value.code == 2


def test_check_schedule_nonpositive_exponent_is_usage_error(capsys):
    assert main(["check-schedule", "-0.5", "0.1", "0.1"]) == 2
    assert "error" in capsys.readouterr().err


# --- simulate --------------------------------------------------------------------


def test_simulate_minimal_run_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "exp"
    code = main([
        "simulate", "--replications", "1", "--max-iters", "1",
        "--out", str(out), "--quiet",
    ])
    assert code == 0
    lines = (out / "runs.csv").read_text().splitlines()
    assert lines[0] == RUNS_HEADER
    assert len(lines) == 1 + 2  # one iteration x two players x one dim
    assert (out / "summary.csv").exists()


def test_simulate_reads_config_and_overrides(tmp_path):
    cfg = tmp_path / "exp.cfg"
    cfg.write_text("game = quadratic-strong\nmax_iters = 30\nreplications = 2\n")
    out = tmp_path / "artifacts"
    code = main([
        "simulate", str(cfg), "--set", "max_iters=10", "--seed", "3",
        "--out", str(out), "--quiet",
    ])
    assert code == 0
    rows = read_runs_csv(out / "runs.csv")
    assert {row["replication"] for row in rows} == {0, 1}
    assert max(row["t"] for row in rows) == 10


def test_simulate_baseline_flag_zeroes_epsilon(tmp_path):
    out = tmp_path / "base"
    code = main([
        "simulate", "--replications", "1", "--max-iters", "5",
        "--baseline", "--out", str(out), "--quiet",
    ])
    assert code == 0
    rows = read_runs_csv(out / "runs.csv")
    assert all(row["epsilon"] == 0.0 for row in rows)


def test_simulate_rejects_unknown_config_key(tmp_path, capsys):
    code = main(["simulate", "--set", "bogus=1", "--out", str(tmp_path), "--quiet"])
    assert code == 2
    assert "unknown config key" in capsys.readouterr().err


def test_simulate_rejects_missing_config_file(tmp_path):
    assert main(["simulate", str(tmp_path / "nope.cfg"), "--quiet"]) == 2


def test_simulate_rejects_invalid_schedule_without_override(tmp_path, capsys):
    code = main([
        "simulate", "--set", "a=0.9", "--set", "b=0.2", "--set", "c=0.1",
        "--replications", "1", "--max-iters", "3", "--out", str(tmp_path / "x"), "--quiet",
    ])
    assert code == 2
    assert "inadmissible" in capsys.readouterr().err


def test_simulate_invalid_schedule_with_override_runs(tmp_path):
    with pytest.warns(UserWarning):
        code = main([
            "simulate", "--set", "a=0.9", "--set", "b=0.2", "--set", "c=0.1",
            "--allow-invalid-schedule", "--replications", "1", "--max-iters", "3",
            "--out", str(tmp_path / "x"), "--quiet",
        ])
    assert code == 0


def test_simulate_same_seed_is_byte_identical(tmp_path):
    for name in ("r1", "r2"):
        assert main([
            "simulate", "--replications", "2", "--max-iters", "25",
            "--seed", "11", "--out", str(tmp_path / name), "--quiet",
        ]) == 0
    a = (tmp_path / "r1" / "runs.csv").read_bytes()
    b = (tmp_path / "r2" / "runs.csv").read_bytes()
    assert a == b


# --- solve -----------------------------------------------------------------------


def test_solve_vi_bilinear(capsys):
    assert main(["solve", "bilinear", "vi", "--quiet"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert np.linalg.norm(payload["y"]) <= 1e-8
    assert payload["residual"] <= 1e-8


def test_solve_tikhonov_shifted_sum(capsys):
    assert main(["solve", "shifted-sum", "tikhonov", "--epsilon", "1", "--quiet"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert np.allclose(payload["y"], [1.0 / 3.0, 1.0 / 3.0], atol=1e-6)


def test_solve_path_writes_artifact(tmp_path, capsys):
    out = tmp_path / "path.json"
    assert main(["solve", "shifted-sum", "path", "--out", str(out), "--quiet"]) == 0
    payload = json.loads(out.read_text())
    assert np.allclose(payload["limit"], [0.5, 0.5], atol=1e-3)
    assert len(payload["path"]) == 4
    assert payload["max_norm"] >= max(np.linalg.norm(p["y"]) for p in payload["path"]) - 1e-12


def test_solve_budget_exhaustion_is_runtime_error(capsys):
    code = main([
        "solve", "quadratic-strong", "vi", "--tol", "1e-14", "--max-iters", "2", "--quiet",
    ])
    assert code == 1
    assert "no convergence" in capsys.readouterr().err


# --- verify-gradient ----------------------------------------------------------------


def test_verify_gradient_passes_on_registry_game(capsys):
    assert main(["verify-gradient", "bilinear", "--samples", "20000", "--seed", "4"]) == 0
    out = capsys.readouterr().out
    assert "score_mc vs mixed_mapping_mc" in out
    assert "score_mc vs analytic" in out


# --- plot -----------------------------------------------------------------------------


def _make_runs_csv(tmp_path):
    out = tmp_path / "sim"
    assert main([
        "simulate", "--replications", "3", "--max-iters", "20",
        "--out", str(out), "--quiet",
    ]) == 0
    return out / "runs.csv"


def test_plot_writes_svg(tmp_path):
    csv_path = _make_runs_csv(tmp_path)
    svg_path = tmp_path / "traj.svg"
    assert main(["plot", str(csv_path), "--out", str(svg_path), "--quiet"]) == 0
    content = svg_path.read_text()
    assert content.lstrip().startswith("<?xml")
    assert "<svg" in content


def test_plot_default_output_next_to_input(tmp_path):
    csv_path = _make_runs_csv(tmp_path)
    assert main(["plot", str(csv_path), "--quiet"]) == 0
    assert csv_path.with_suffix(".svg").exists()


def test_plot_is_deterministic(tmp_path):
    csv_path = _make_runs_csv(tmp_path)
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    assert main(["plot", str(csv_path), "--out", str(a), "--quiet"]) == 0
    assert main(["plot", str(csv_path), "--out", str(b), "--quiet"]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_plot_single_replication_band_collapses(tmp_path):
    out = tmp_path / "single"
    assert main([
        "simulate", "--replications", "1", "--max-iters", "10",
        "--out", str(out), "--quiet",
    ]) == 0
    svg = tmp_path / "single.svg"
    assert main(["plot", str(out / "runs.csv"), "--out", str(svg), "--quiet"]) == 0
    assert svg.exists()


def test_plot_rejects_empty_data_section(tmp_path, capsys):
    path = tmp_path / "empty.csv"
    path.write_text(RUNS_HEADER + "\n")
    assert main(["plot", str(path), "--quiet"]) == 2
    assert ":2:" in capsys.readouterr().err


def test_plot_rejects_malformed_csv(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text(RUNS_HEADER + "\n0,1,0,0,broken\n")
    assert main(["plot", str(path), "--quiet"]) == 2
    assert ":2:" in capsys.readouterr().err
