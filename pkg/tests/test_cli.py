import json
import subprocess
import sys

import pytest

from sbmlab import cli


def run_cli(args, tmp_path, **kw):
    return cli.main(["--out", str(tmp_path)] + args)


def test_no_arguments_is_usage_error(tmp_path, capsys):
    assert cli.main([]) == 2


def test_unknown_flag_exits_2(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "sbmlab.cli", "solve-f", "--bogus", "1"],
        capture_output=True)
    assert proc.returncode == 2


def test_unknown_config_key_exits_2(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"not_a_key": 1}))
    rc = cli.main(["--config", str(cfg), "--out", str(tmp_path), "solve-f"])
    assert rc == 2


def test_eig_half_killing_prints_half(tmp_path, capsys):
    rc = run_cli(["eig", "--phi", "F_half", "--method", "hermite"], tmp_path)
    assert rc == 0
    out = capsys.readouterr().out
    assert "0.5000" in out


def test_solve_f_round_trip_and_determinism(tmp_path, capsys):
    rc = run_cli(["solve-f", "--n-points", "401"], tmp_path)
    assert rc == 0
    out1 = capsys.readouterr().out
    run_id = out1.split("run ")[1].split(" ")[0]
    man = tmp_path / "runs" / run_id / "manifest.json"
    blob1 = man.read_bytes()
    # second run with identical config: same id, byte-identical manifest
    rc = run_cli(["solve-f", "--n-points", "401"], tmp_path)
    assert rc == 0
    assert man.read_bytes() == blob1


def test_config_file_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_points": 301}))
    rc = cli.main(["--config", str(cfg), "--out", str(tmp_path), "solve-f"])
    assert rc == 0
    out = capsys.readouterr().out
    run_id = out.split("run ")[1].split(" ")[0]
    doc = json.loads((tmp_path / "runs" / run_id / "manifest.json").read_text())
    assert doc["config"]["n_points"] == 301
    assert doc["config_sources"]["n_points"] == "file"
    assert doc["config_sources"]["tol"] == "default"


def test_simulate_writes_masses(tmp_path, capsys):
    rc = run_cli(["simulate", "--backend", "particles", "--n-replicates", "20",
                  "--n-ppum", "200", "--t", "0.5"], tmp_path)
    assert rc == 0
    out = capsys.readouterr().out
    run_id = out.split("run ")[1].split(" ")[0]
    rd = tmp_path / "runs" / run_id
    assert (rd / "masses.csv").exists()
    assert (rd / "sim_summary.json").exists()


def test_numerical_failure_maps_to_exit_1(tmp_path):
    rc = run_cli(["eig", "--phi", "zero", "--method", "hermite",
                  "--basis-size", "10"], tmp_path)
    assert rc == 1
