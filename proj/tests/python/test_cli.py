import json
import subprocess

import pytest

SMALL = "node_count = 20\nduration_s = 400\ncalibration_start_s = 100\nattack_start_s = 300\n"


def call(cli, *args):
    return subprocess.run([cli, *args], capture_output=True, text=True)


@pytest.fixture
def conf(tmp_path):
    path = tmp_path / "small.conf"
    path.write_text(SMALL)
    return str(path)


def test_run_writes_json_and_csv(cli, conf, tmp_path):
    out = tmp_path / "r.json"
    p = call(cli, "run", "--config", conf, "--seed", "4", "--out", str(out))
    assert p.returncode == 0, p.stderr
    report = json.loads(out.read_text())
    assert report["seed"] == 4

    csv = tmp_path / "r.csv"
    assert call(cli, "run", "--config", conf, "--seed", "4", "--out", str(csv)).returncode == 0
    assert len(csv.read_text().splitlines()) == 2


def test_run_is_byte_identical(cli, conf, tmp_path):
    outs = []
    for name in ("a", "b"):
        out, trace = tmp_path / f"{name}.csv", tmp_path / f"{name}.ndjson"
        p = call(cli, "run", "--config", conf, "--seed", "9", "--out", str(out), "--trace", str(trace))
        assert p.returncode == 0, p.stderr
        outs.append((out.read_bytes(), trace.read_bytes()))
    assert outs[0] == outs[1]


def test_exit_code_config_error(cli, tmp_path):
    bad = tmp_path / "bad.conf"
    bad.write_text("colour = blue\n")
    p = call(cli, "run", "--config", str(bad), "--seed", "1", "--out", str(tmp_path / "x.json"))
    assert p.returncode == 2
    assert "colour" in p.stderr


def test_exit_code_bad_arguments(cli, conf, tmp_path):
    assert call(cli, "run", "--config", conf).returncode == 2
    p = call(cli, "sweep", "--config", conf, "--seeds", "1", "--ratios", "0.1", "--defenses", "moat",
             "--out", str(tmp_path / "s"))
    assert p.returncode == 2


def test_exit_code_topology(cli, tmp_path):
    sparse = tmp_path / "sparse.conf"
    sparse.write_text(SMALL + "tx_range_m = 1\nfield_side_m = 500\n")
    p = call(cli, "run", "--config", str(sparse), "--seed", "1", "--out", str(tmp_path / "x.json"))
    assert p.returncode == 3


def test_exit_code_io(cli, conf, tmp_path):
    p = call(cli, "run", "--config", conf, "--seed", "1", "--out", str(tmp_path / "missing" / "dir" / "x.json"))
    assert p.returncode == 4
    p = call(cli, "run", "--config", str(tmp_path / "nope.conf"), "--seed", "1", "--out", str(tmp_path / "x.json"))
    assert p.returncode == 4
    assert call(cli, "report", "--in", str(tmp_path / "nothing"), "--format", "csv").returncode == 4


def test_sweep_and_report(cli, conf, tmp_path):
    out = tmp_path / "sweep"
    p = call(cli, "sweep", "--config", conf, "--seeds", "2", "--ratios", "0,0.2", "--defenses", "uitrust,none",
             "--out", str(out))
    assert p.returncode == 0, p.stderr
    rows = (out / "results.csv").read_text().splitlines()
    assert len(rows) == 1 + 2 * 2 * 2

    csv = call(cli, "report", "--in", str(out), "--format", "csv")
    assert csv.returncode == 0
    assert csv.stdout.splitlines() == rows

    jsonl = call(cli, "report", "--in", str(out), "--format", "jsonl")
    assert len([json.loads(l) for l in jsonl.stdout.splitlines()]) == 8

    again = tmp_path / "again"
    call(cli, "sweep", "--config", conf, "--seeds", "2", "--ratios", "0,0.2", "--defenses", "uitrust,none",
         "--out", str(again))
    assert (again / "results.csv").read_bytes() == (out / "results.csv").read_bytes()
    assert (again / "runs.jsonl").read_bytes() == (out / "runs.jsonl").read_bytes()
