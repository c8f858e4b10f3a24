import json
import pathlib
import subprocess
import sys

import pytest

from adstab import cli, ghzx

GOLDEN = pathlib.Path(__file__).parent / "golden"


def run(*argv):
    return subprocess.run(
        [sys.executable, "-m", "adstab", *argv], capture_output=True, check=False
    )


def test_thresholds_row_and_layout():
    p = run("thresholds", "--n", "2", "--alpha", "0.4")
    assert p.returncode == 0
    lines = p.stdout.decode().split("\n")
    assert b"\r\n" not in p.stdout
    assert lines[0].startswith("# adstab ") and "n=2" in lines[0]
    assert lines[1].split(",")[:5] == ["n", "alpha", "eta", "gamma_minus", "gamma_plus"]
    row = lines[2].split(",")
    assert row[3] == "0.323611084271" and row[4] == "0.563564219528"
    assert row[-1] == "II"


@pytest.mark.parametrize(
    "golden,argv",
    [
        ("haar_n3_s500_seed2024.csv", ["haar", "--n", "3", "--samples", "500", "--seed", "2024"]),
        ("thresholds_n3.csv", ["thresholds", "--n", "3", "--alpha-grid", "0.1:0.6:6"]),
    ],
)
def test_golden_outputs(golden, argv):
    # regression snapshots; the threshold columns are checked against the oracle in test_ghzx
    assert run(*argv).stdout == (GOLDEN / golden).read_bytes()


def test_output_is_deterministic(tmp_path):
    argv = ["scan", "--n", "3", "--alpha", "0.3", "--gamma-grid", "0:1:11"]
    a, b = run(*argv), run(*argv)
    assert a.returncode == 0 and a.stdout == b.stdout
    out = tmp_path / "scan.csv"
    assert run(*argv, "-o", str(out)).returncode == 0
    assert out.read_bytes() == a.stdout


def test_json_format():
    p = run("thresholds", "--n", "2", "--alpha", "0.4", "--format", "json")
    doc = json.loads(p.stdout)
    assert doc["config"]["n"] == 2 and doc["config"]["alpha_grid"] is None
    assert dict(zip(doc["columns"], doc["rows"][0]))["regime"] == "II"


def test_rom_verify_lp():
    p = run("rom", "--n", "2", "--alpha", "0.4", "--gamma", "0.5", "--verify-lp")
    assert p.returncode == 0
    cols, row = p.stdout.decode().splitlines()[1:3]
    rec = dict(zip(cols.split(","), row.split(",")))
    assert rec["inside"] == rec["inside_lp"]
    assert float(rec["abs_diff"]) < 1e-9


def test_enumerate_jsonl():
    p = run("enumerate", "--n", "2")
    lines = p.stdout.decode().splitlines()
    recs = [json.loads(x) for x in lines if not x.startswith("#")]
    assert len(recs) == 60
    assert all(r["n"] == 2 for r in recs)


def test_usage_errors_exit_1():
    assert run("thresholds", "--n", "2").returncode == 1
    assert run("thresholds", "--n", "2", "--alpha", "1.5").returncode == 1
    assert run("scan", "--n", "2", "--alpha", "0.3", "--gamma-grid", "0:1").returncode == 1
    assert run("nonsense").returncode == 1


def test_capability_limit_exit_3():
    p = run("rom", "--n", "4", "--alpha", "0.3", "--gamma", "0.2", "--verify-lp")
    assert p.returncode == 3
    assert b"capability limit" in p.stderr


def test_verification_failure_exit_2(monkeypatch, capsys):
    monkeypatch.setattr(ghzx, "rom_closed", lambda pt: 7.0)
    code = cli.main(["rom", "--n", "2", "--alpha", "0.4", "--gamma", "0.5", "--verify-lp"])
    assert code == 2
    out = capsys.readouterr()
    assert "rom_lp" in out.out  # the offending table is still written
    assert "disagree" in out.err


def test_verify_subcommand():
    p = run("verify", "--points", "11")
    assert p.returncode == 0, p.stderr
    body = [l for l in p.stdout.decode().splitlines() if not l.startswith("#")]
    cols = body[0].split(",")
    assert all(dict(zip(cols, l.split(",")))["status"] == "pass" for l in body[1:])
    assert len(body) >= 6
