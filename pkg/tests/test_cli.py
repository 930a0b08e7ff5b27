"""End-to-end runs of the command line front end in subprocesses."""

import json
import os
import subprocess
import sys


def run_cli(*argv, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "upslopes.cli", *argv],
        capture_output=True, text=True, cwd=cwd, env=os.environ.copy())


def test_trace_command():
    r = run_cli("trace", "--level", "1", "--weight", "12", "--n", "2")
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    assert out["command"] == "trace"
    assert out["results"]["trace"] == "-24"


def test_trace_command_mod():
    r = run_cli("trace", "--level", "1", "--weight", "3438", "--n", "2",
                "--mod", "1000003")
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    assert int(out["results"]["trace"]) < 1000003


def test_slopes_command():
    r = run_cli("slopes", "--p", "59", "--level", "1", "--weight", "16")
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    assert out["results"]["slopes"] == [["1", 1], ["7", 72], ["14", 1]]
    assert out["results"]["dimension"] == 74


def test_theorem1_roundtrip(tmp_path):
    cert_path = tmp_path / "t1.json"
    r = run_cli("theorem1", "--out", str(cert_path))
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    assert out["results"]["violated"] is True
    first = cert_path.read_bytes()

    # a rerun must reproduce the file byte for byte
    r = run_cli("theorem1", "--out", str(cert_path))
    assert r.returncode == 0
    assert cert_path.read_bytes() == first

    r = run_cli("verify", str(cert_path))
    assert r.returncode == 0, r.stdout
    assert json.loads(r.stdout)["results"]["ok"] is True


def test_verify_rejects_tampering(tmp_path):
    cert_path = tmp_path / "t1.json"
    assert run_cli("theorem1", "--out", str(cert_path)).returncode == 0
    cert = json.loads(cert_path.read_text())
    cert["k1_d_at_alpha_1"] = 2
    cert_path.write_text(json.dumps(cert))
    r = run_cli("verify", str(cert_path))
    assert r.returncode == 1
    assert json.loads(r.stdout)["results"]["ok"] is False


def test_verify_missing_file():
    r = run_cli("verify", "/nonexistent/cert.json")
    assert r.returncode == 1


def test_theorem2_small_window(tmp_path):
    cert_path = tmp_path / "t2.json"
    r = run_cli("theorem2", "--nmax", "14", "--out", str(cert_path))
    assert r.returncode == 0, r.stderr
    out = json.loads(r.stdout)
    assert out["results"]["members"] == [14]
    assert out["results"]["violated"] is True
    r = run_cli("verify", str(cert_path))
    assert r.returncode == 0


def test_usage_errors_exit_2():
    assert run_cli("frobnicate").returncode == 2
    assert run_cli().returncode == 2
    assert run_cli("trace", "--level", "1").returncode == 2


def test_infeasible_request_exits_3():
    r = run_cli("slopes", "--p", "59", "--level", "1", "--weight", "4000")
    assert r.returncode == 3
    err = json.loads(r.stderr)
    assert err["error"] == "infeasible"
