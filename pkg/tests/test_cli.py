import json
import subprocess
import sys
from pathlib import Path

import pytest

from nuedyn.cli import main

QUICK_MAP = {
    "map": {"eigenvalues": [2, 4], "eps": 0.05, "r": 0.05, "gamma1": 0.05,
            "gamma2": 0.06, "slope": 0.9},
    "run": {"N": 2000, "seeds": 4, "seed": 7, "grid_per_axis": 512,
            "gamma0": 0.05, "c": 5e-10, "eps0_grid": 128, "trials": 20,
            "max_len": 4, "rho": 0.5},
}

GOLDEN_SFT = {
    "sft": {"d": 2, "rows": [[1, 1], [1, 0]],
            "potential": {"depth": 1, "values": {"0": 1.0, "1": 0.0}}},
    "run": {"trials": 40, "seed": 3, "max_len": 6, "rho": 0.5},
}


@pytest.fixture()
def quick_cfg(tmp_path):
    path = tmp_path / "quick.json"
    path.write_text(json.dumps(QUICK_MAP))
    return path


@pytest.fixture()
def golden_cfg(tmp_path):
    path = tmp_path / "golden.json"
    path.write_text(json.dumps(GOLDEN_SFT))
    return path


def run_cli(*argv):
    return main([str(a) for a in argv])


def test_verify_passes_and_reports(quick_cfg, tmp_path, capsys):
    out = tmp_path / "out"
    code = run_cli("verify", "--config", quick_cfg, "--out", out)
    assert code == 0
    doc = json.loads((out / "report.json").read_text())
    assert doc["all_passed"] is True
    assert doc["gamma0_source"] == "supplied"
    stdout = capsys.readouterr().out
    assert json.loads(stdout)["all_passed"] is True


def test_verify_linear_map_has_empty_v(tmp_path):
    cfg = tmp_path / "lin.json"
    cfg.write_text(json.dumps({"map": {"eigenvalues": [2, 4]},
                               "run": {"grid_per_axis": 64}}))
    out = tmp_path / "out"
    assert run_cli("verify", "--config", cfg, "--out", out, "--quiet") == 0
    doc = json.loads((out / "report.json").read_text())
    assert doc["v_cells"] == 0


def test_verify_failing_map_exits_one(tmp_path):
    cfg = tmp_path / "bad.json"
    bad = dict(QUICK_MAP)
    bad["map"] = dict(bad["map"], gamma1=3.0)
    del bad["map"]["slope"]  # slope couples to gamma1: grossly contracting
    bad["run"] = dict(bad["run"], grid_per_axis=2048)
    cfg.write_text(json.dumps(bad))
    assert run_cli("verify", "--config", cfg, "--quiet") == 1


def test_usage_errors_exit_two(tmp_path):
    missing = tmp_path / "nope.json"
    assert run_cli("verify", "--config", missing, "--quiet") == 2
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert run_cli("lyapunov", "--config", broken, "--quiet") == 2


def test_lyapunov_linear_exact(tmp_path):
    import math

    cfg = tmp_path / "lin.json"
    cfg.write_text(json.dumps({"map": {"eigenvalues": [2, 4]},
                               "run": {"N": 2000, "seeds": 3, "seed": 1}}))
    out = tmp_path / "out"
    assert run_cli("lyapunov", "--config", cfg, "--out", out, "--quiet") == 0
    doc = json.loads((out / "lyapunov.json").read_text())
    assert abs(doc["exponent_min"][0] - math.log(4.0)) < 1e-10
    assert abs(doc["exponent_min"][1] - math.log(2.0)) < 1e-10


def test_hyp_times_outputs(quick_cfg, tmp_path):
    out = tmp_path / "out"
    assert run_cli("hyp-times", "--config", quick_cfg, "--out", out, "--quiet") == 0
    doc = json.loads((out / "hyp_times.json").read_text())
    assert doc["all_preconditions_ok"] is True
    assert len(doc["per_seed"]) == 4
    header = (out / "density.csv").read_text().splitlines()[0]
    assert header.startswith("step,density_seed0")


def test_equilibrium_golden_mean(golden_cfg, tmp_path):
    out = tmp_path / "out"
    assert run_cli("equilibrium", "--config", golden_cfg, "--out", out, "--quiet") == 0
    doc = json.loads((out / "equilibrium.json").read_text())
    assert abs(doc["equilibrium_gap"]) < 1e-10
    # P ~ 1.2516 and rho*htop ~ 0.2406: max phi = 1 clears the margin barely
    assert doc["low_variation"] is True
    rows = (out / "gibbs.csv").read_text().splitlines()
    assert rows[0] == "word,mu,S_n_phi,ratio"
    assert len(rows) > 10


def test_equilibrium_induced_from_map(quick_cfg, tmp_path):
    import math

    out = tmp_path / "out"
    assert run_cli("equilibrium", "--config", quick_cfg, "--out", out, "--quiet") == 0
    doc = json.loads((out / "equilibrium.json").read_text())
    assert doc["origin"] == "induced"
    assert doc["d"] == 8
    assert abs(doc["pressure"] - math.log(8.0)) < 1e-12
    assert doc["low_variation"] is True


def test_equilibrium_high_variation_warns_but_computes(tmp_path, capsys):
    cfg_doc = {
        "sft": {"d": 2, "rows": [[1, 1], [1, 1]],
                "potential": {"depth": 1, "values": {"0": 10.0, "1": 0.0}}},
        "run": {"rho": 0.5, "max_len": 4},
    }
    cfg = tmp_path / "hv.json"
    cfg.write_text(json.dumps(cfg_doc))
    out = tmp_path / "out"
    assert run_cli("equilibrium", "--config", cfg, "--out", out) == 0
    doc = json.loads((out / "equilibrium.json").read_text())
    assert doc["low_variation"] is False
    assert abs(doc["equilibrium_gap"]) < 1e-10  # computation still performed
    assert "low-variation" in capsys.readouterr().err


def test_variational_exit_codes(golden_cfg, tmp_path):
    out = tmp_path / "out"
    assert run_cli("variational", "--config", golden_cfg, "--out", out, "--quiet") == 0
    doc = json.loads((out / "variational.json").read_text())
    assert doc["gap_min"] >= -1e-10
    assert abs(doc["equilibrium_gap"]) <= 1e-10
    rows = (out / "gaps.csv").read_text().splitlines()
    assert len(rows) == 41


def test_gibbs_command(golden_cfg, tmp_path):
    out = tmp_path / "out"
    assert run_cli("gibbs", "--config", golden_cfg, "--out", out, "--quiet") == 0
    doc = json.loads((out / "gibbs.json").read_text())
    assert doc["ratio_min"] > 0
    assert doc["ratio_max"] < 10


def test_csv_stdout_format(golden_cfg, capsys):
    assert run_cli("gibbs", "--config", golden_cfg, "--format", "csv") == 0
    out = capsys.readouterr().out
    assert out.startswith("word,mu,S_n_phi,ratio")


def test_seed_flag_overrides_config(golden_cfg, tmp_path):
    out1, out2, out3 = tmp_path / "a", tmp_path / "b", tmp_path / "c"
    run_cli("variational", "--config", golden_cfg, "--out", out1, "--quiet")
    run_cli("variational", "--config", golden_cfg, "--out", out2, "--quiet", "--seed", "99")
    run_cli("variational", "--config", golden_cfg, "--out", out3, "--quiet", "--seed", "99")
    a = (out1 / "gaps.csv").read_bytes()
    b = (out2 / "gaps.csv").read_bytes()
    c = (out3 / "gaps.csv").read_bytes()
    assert a != b and b == c


def test_console_entrypoint_runs(golden_cfg, tmp_path):
    # exercise the installed module entry point end to end
    proc = subprocess.run(
        [sys.executable, "-m", "nuedyn", "equilibrium", "--config",
         str(golden_cfg), "--quiet"],
        capture_output=True, text=True)
    assert proc.returncode == 0
