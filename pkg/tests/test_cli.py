"""Command-line interface: artifacts, exit codes, config handling."""

import json

import numpy as np
import pytest

from conftest import ALPHA0_STAR
from dyadlab.cli import main


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


# ----------------------------------------------------------------- simulate


def test_simulate_zero_data_writes_zero_table(tmp_path):
    assert run(tmp_path, "simulate", "--shells", "6", "--t-end", "1",
               "--initial", "zeros", "--t-eval", "8") == 0
    assert (tmp_path / "trajectory.png").exists()
    back = np.loadtxt(tmp_path / "trajectory.csv", delimiter=",", skiprows=1)
    assert back.shape == (8, 8)  # t, a0..a5, energy
    assert np.all(back[:, 1:] == 0.0)


def test_simulate_unforced_drift_stays_in_budget(tmp_path, capsys):
    assert run(tmp_path, "simulate", "--shells", "8", "--t-end", "20",
               "--t-eval", "101") == 0
    out = capsys.readouterr().out
    assert "drift" in out
    back = np.loadtxt(tmp_path / "trajectory.csv", delimiter=",", skiprows=1)
    drift = np.max(np.abs(back[:, -1] - back[0, -1]))
    assert drift <= 100.0 * 1e-10 * 20.0


def test_simulate_forced_reports_fixed_point_gap(tmp_path, capsys):
    assert run(tmp_path, "simulate", "--shells", "12", "--t-end", "5",
               "--forcing", "1", "--t-eval", "41") == 0
    out = capsys.readouterr().out
    assert "fixed-point deviation" in out
    # energy grows under forcing; the conservation line must not appear
    assert "reference bound" not in out


def test_simulate_requires_shells(tmp_path, capsys):
    assert run(tmp_path, "simulate", "--t-end", "1") == 2
    assert "--shells" in capsys.readouterr().err


def test_simulate_numerical_failure_exits_3(tmp_path, capsys):
    code = run(tmp_path, "simulate", "--lambda", "10", "--shells", "20",
               "--forcing", "1e12", "--initial", "fixed-point", "--t-end", "1")
    assert code == 3
    assert "numerical failure" in capsys.readouterr().err


def test_simulate_rejects_bad_parameters(tmp_path, capsys):
    assert run(tmp_path, "simulate", "--shells", "6", "--t-end", "1",
               "--beta", "-0.5") == 2
    assert "beta" in capsys.readouterr().err


# ------------------------------------------------------------------ profile


def test_profile_both_methods_agree(tmp_path, capsys):
    assert run(tmp_path, "profile") == 0
    prof = json.loads((tmp_path / "profile.json").read_text())
    alpha = json.loads((tmp_path / "alpha0.json").read_text())
    assert (tmp_path / "profile.png").exists()
    assert {"lambda", "beta", "alpha0", "alphas", "a_star", "const_fit", "residual"} <= set(prof)
    assert {"lambda", "beta", "alpha0", "method", "bracket", "iterations",
            "transversality_margin"} <= set(alpha)
    assert alpha["method"] == "both"
    assert abs(alpha["alpha0"] - ALPHA0_STAR) < 1e-9
    assert abs(alpha["alpha0_curve"] - alpha["alpha0"]) < 1e-6
    assert "agree" in capsys.readouterr().out


def test_profile_bisect_frozen_value(tmp_path):
    assert run(tmp_path, "profile", "--method", "bisect", "--beta", "0.02") == 0
    alpha = json.loads((tmp_path / "alpha0.json").read_text())
    assert alpha["method"] == "bisect"
    assert alpha["beta"] == 0.02
    assert alpha["alpha0"] == pytest.approx(0.447836455051629, abs=1e-9)
    assert alpha["iterations"] > 20


def test_profile_curve_method_records_crossing(tmp_path):
    assert run(tmp_path, "profile", "--method", "curve") == 0
    alpha = json.loads((tmp_path / "alpha0.json").read_text())
    assert alpha["method"] == "curve"
    assert alpha["transversality_margin"] > 1.0
    assert alpha["t_star"] == pytest.approx(-0.317068586, abs=1e-6)


def test_profile_inadmissible_rectangle_exits_2(tmp_path, capsys):
    assert run(tmp_path, "profile", "--method", "curve", "--r0", "1.0") == 2
    assert '"admissible": false' in capsys.readouterr().err


def test_profile_rejects_negative_beta(tmp_path):
    assert run(tmp_path, "profile", "--beta", "-0.1") == 2


# -------------------------------------------------------------------- curve


def test_curve_artifacts_and_diagnostics(tmp_path, capsys):
    assert run(tmp_path, "curve") == 0
    diag = json.loads((tmp_path / "curve_diagnostics.json").read_text())
    assert set(diag) == {"iterations", "residual", "contraction_ratio", "c_prime", "clipped"}
    assert diag["iterations"] == 19
    assert diag["residual"] < 2e-11
    assert diag["clipped"] is True
    assert diag["c_prime"] == pytest.approx(1.0 / 3.0, abs=2e-3)
    back = np.loadtxt(tmp_path / "curve.csv", delimiter=",", skiprows=1)
    assert np.max(np.abs(back[:, 1])) <= 0.03 + 1e-12
    assert (tmp_path / "curve.png").exists()
    assert "contraction" in capsys.readouterr().out


def test_curve_inadmissible_exits_2_with_certificate(tmp_path, capsys):
    assert run(tmp_path, "curve", "--r0", "1.0") == 2
    err = capsys.readouterr().err
    assert '"admissible": false' in err
    assert "error_sup" in err


def test_curve_outputs_are_reproducible(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    a.mkdir()
    b.mkdir()
    assert run(a, "curve") == 0
    assert run(b, "curve") == 0
    assert (a / "curve.csv").read_bytes() == (b / "curve.csv").read_bytes()
    assert (a / "curve_diagnostics.json").read_bytes() == (b / "curve_diagnostics.json").read_bytes()


# ------------------------------------------------------------------- verify


def test_verify_passes_at_reference_configuration(tmp_path, capsys):
    assert run(tmp_path, "verify") == 0
    doc = json.loads((tmp_path / "verify.json").read_text())
    assert doc["passed"] is True
    out = capsys.readouterr().out
    assert "PASS" in out
    assert "FAIL" not in out


def test_verify_broken_rectangle_exits_4(tmp_path, capsys):
    assert run(tmp_path, "verify", "--r0", "1.0") == 4
    captured = capsys.readouterr()
    assert "FAIL" in captured.out
    assert "error_sup" in captured.out


# ------------------------------------------------------------------- figure


def test_figure_emits_ordered_polylines(tmp_path, capsys):
    assert run(tmp_path, "figure") == 0
    assert (tmp_path / "figure.png").exists()
    lines = (tmp_path / "figure.csv").read_text().strip().split("\n")
    assert lines[0] == "iterate,s,a,b"
    back = np.loadtxt(tmp_path / "figure.csv", delimiter=",", skiprows=1)
    ks = sorted(set(back[:, 0].astype(int)))
    assert ks == [0, 1, 2, 3, 4]
    # successive images climb in b at matched parameter values
    for k in range(4):
        cur = back[back[:, 0] == k]
        nxt = back[back[:, 0] == k + 1]
        s_common, i_cur, i_nxt = np.intersect1d(cur[:, 1], nxt[:, 1], return_indices=True)
        assert s_common.size > 100
        assert np.all(nxt[i_nxt, 3] > cur[i_cur, 3])
    assert "ordering" in capsys.readouterr().out


def test_figure_truncation_note_for_strong_backscatter(tmp_path, capsys):
    assert run(tmp_path, "figure", "--beta", "0.3", "--t-min", "-0.2",
               "--t-max", "0.5", "--iterates", "2", "--no-curve") == 0
    assert "dropped" in capsys.readouterr().out


# ------------------------------------------------------------------- config


def test_config_file_supplies_defaults(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment line\nbeta = 0.02\nmethod = bisect\nn-max = 24\n")
    assert run(tmp_path, "profile", "--config", str(cfg)) == 0
    alpha = json.loads((tmp_path / "alpha0.json").read_text())
    assert alpha["beta"] == 0.02
    assert alpha["method"] == "bisect"
    assert alpha["alpha0"] == pytest.approx(0.447836455051629, abs=1e-9)


def test_explicit_flags_beat_config_values(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("beta = 0.02\nmethod = bisect\n")
    assert run(tmp_path, "profile", "--config", str(cfg), "--beta", "0.05") == 0
    alpha = json.loads((tmp_path / "alpha0.json").read_text())
    assert alpha["beta"] == 0.05
    assert alpha["alpha0"] == pytest.approx(0.432214257989128, abs=1e-9)


def test_unknown_config_key_exits_2(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus = 1\n")
    assert run(tmp_path, "profile", "--config", str(cfg)) == 2
    assert "bogus" in capsys.readouterr().err


def test_missing_subcommand_is_a_usage_error():
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2
