"""CLI integration: subcommands, exit codes, byte determinism."""
import json
import subprocess
import sys

import numpy as np
import pytest

from matchgate_shadows.statevec import basis_state, random_state, save_state

CLI = [sys.executable, "-m", "matchgate_shadows.cli"]


def run(*args, **kw):
    return subprocess.run(CLI + list(args), capture_output=True, text=True, **kw)


@pytest.fixture(scope="module")
def state_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("states") / "r2.state"
    save_state(random_state(2, np.random.default_rng(3)), path)
    return str(path)


@pytest.fixture(scope="module")
def obs_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("obs") / "obs.txt"
    path.write_text("1 2\n1 4\n1 2 3 4\n")
    return str(path)


def test_sample_deterministic_and_counted():
    a = run("sample", "--ensemble", "optimal", "--n", "2", "--shots", "3", "--seed", "7")
    b = run("sample", "--ensemble", "optimal", "--n", "2", "--shots", "3", "--seed", "7")
    assert a.returncode == 0 and a.stdout == b.stdout
    lines = a.stdout.strip().splitlines()
    assert len(lines) == 3
    for line in lines:
        doc = json.loads(line)
        assert doc["n_modes"] == 2
        assert "gate_count" in doc and "depth" in doc
        assert "signed_permutation" in doc


def test_sample_haar_n1_single_rotation():
    out = run("sample", "--ensemble", "haar", "--n", "1", "--shots", "1", "--seed", "1")
    doc = json.loads(out.stdout.strip())
    assert len(doc["rotations"]) == 1
    assert doc["rotations"][0]["axis"] == 2


def test_sample_zero_shots():
    out = run("sample", "--ensemble", "haar", "--n", "2", "--shots", "0", "--seed", "1")
    assert out.returncode == 0 and out.stdout == ""


def test_sample_bad_ensemble_usage_error():
    out = run("sample", "--ensemble", "nope", "--n", "2", "--shots", "1", "--seed", "1")
    assert out.returncode == 2


def test_estimate_deterministic(state_file, obs_file, tmp_path):
    args = (
        "estimate",
        "--state-file",
        state_file,
        "--ensemble",
        "two_angle",
        "--shots",
        "500",
        "--observables",
        obs_file,
        "--seed",
        "11",
    )
    a = run(*args)
    b = run(*args)
    assert a.returncode == 0 and a.stdout == b.stdout
    lines = a.stdout.strip().splitlines()
    assert lines[0] == "observable,re,im,method,batches,shots,seed"
    assert len(lines) == 4


def test_estimate_vacuum_near_i(tmp_path, obs_file):
    state_path = tmp_path / "vac.state"
    save_state(basis_state("00"), state_path)
    out = run(
        "estimate",
        "--state-file",
        str(state_path),
        "--ensemble",
        "two_angle",
        "--shots",
        "20000",
        "--observables",
        obs_file,
        "--seed",
        "5",
    )
    row = out.stdout.strip().splitlines()[1].split(",")
    assert row[0] == "1 2"
    assert abs(float(row[1])) < 0.1 and abs(float(row[2]) - 1.0) < 0.1


def test_estimate_rejects_odd_degree_with_line_number(state_file, tmp_path):
    bad = tmp_path / "bad_obs.txt"
    bad.write_text("1 2\n1\n")
    out = run(
        "estimate",
        "--state-file",
        state_file,
        "--ensemble",
        "two_angle",
        "--shots",
        "10",
        "--observables",
        str(bad),
        "--seed",
        "1",
    )
    assert out.returncode == 3
    assert ":2:" in out.stderr  # diagnostic names the offending line


def test_estimate_missing_state_file(obs_file):
    out = run(
        "estimate",
        "--state-file",
        "/nonexistent.state",
        "--ensemble",
        "two_angle",
        "--shots",
        "10",
        "--observables",
        obs_file,
        "--seed",
        "1",
    )
    assert out.returncode == 3


def test_verify_design3_n1(tmp_path):
    report_path = tmp_path / "report.json"
    out = run("verify", "--check", "design3", "--n", "1", "--out", str(report_path))
    assert out.returncode == 0
    report = json.loads(report_path.read_text())
    assert report["pass"] is True and report["max_deviation"] < 1e-9


def test_verify_design3_resource_cap():
    out = run("verify", "--check", "design3", "--n", "3")
    assert out.returncode == 4
    assert "cap" in out.stderr


def test_verify_gamma4():
    out = run("verify", "--check", "gamma4")
    assert out.returncode == 0
    report = json.loads(out.stdout)
    assert abs(report["gamma_uniform"] - 1.5) < 1e-9
    assert abs(report["gamma_clifford_support"] - 1.0) < 1e-9


def test_verify_lambda_table():
    out = run("verify", "--check", "lambda", "--n", "4")
    assert out.returncode == 0
    report = json.loads(out.stdout)
    assert report["table"]["1"]["fraction"] == "1/7"


def test_verify_failure_exit_code():
    # an impossible tolerance forces the verification-failed exit code
    out = run("verify", "--check", "gamma4", "--tol", "1e-20")
    assert out.returncode == 5
    report = json.loads(out.stdout)
    assert report["pass"] is False


def test_verify_invariances_n2():
    out = run("verify", "--check", "sign-invariance", "--n", "2", "--tol", "1e-10")
    assert out.returncode == 0
    out = run("verify", "--check", "matching-invariance", "--n", "2", "--tol", "1e-10")
    assert out.returncode == 0
    report = json.loads(out.stdout)
    assert report["negative_control_deviation"] > 1e-6


def test_bench_rows_and_determinism(state_file, tmp_path):
    out1 = tmp_path / "b1.csv"
    out2 = tmp_path / "b2.csv"
    args = (
        "bench",
        "--state-file",
        state_file,
        "--ensembles",
        "two_angle,optimal,haar",
        "--grid",
        "100,400,1600",
        "--bootstrap",
        "60",
        "--seed",
        "9",
    )
    assert run(*args, "--out", str(out1)).returncode == 0
    assert run(*args, "--out", str(out2)).returncode == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().strip().splitlines()
    assert lines[0] == "ensemble,N,mean_abs_error,std_abs_error,bootstrap_size,seed"
    assert len(lines) == 1 + 9  # 3 ensembles x 3 grid points
    for line in lines[1:]:
        cols = line.split(",")
        assert cols[-1] == "9"  # identical seed column
        assert float(cols[2]) > 0 and float(cols[3]) > 0
