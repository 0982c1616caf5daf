import json
import math
import subprocess
import sys

import pytest

from hellyapprox.cli import main
from hellyapprox.counterexample import a_k
from hellyapprox.harness import CSV_FIELDS, ExperimentConfig, exit_code, format_rows, parse_rows, run_sweep
from hellyapprox.harness import SweepRow
from hellyapprox.normed_space import INF, NormSpec


@pytest.fixture(scope="module")
def l2_rows():
    cfg = ExperimentConfig(NormSpec(10, 2), [1, 2, 4, 8, 16], instances=2, bound="euclidean", timing=False)
    return run_sweep(cfg)


def test_euclidean_sweep(l2_rows):
    assert [r.k for r in l2_rows] == [1, 1, 2, 2, 4, 4, 8, 8, 16, 16]
    for r in l2_rows:
        assert r.bound == 1 / math.sqrt(r.k)
        assert r.empirical <= r.bound + 1e-6 and r.status == "pass"
    assert exit_code(l2_rows) == 0


def test_counterexample_sweep():
    rows = run_sweep(ExperimentConfig(NormSpec(1, INF), [2, 3, 4], mode="counterexample_check"))
    assert [r.k for r in rows] == [2, 3, 4]
    for r in rows:
        assert r.empirical >= a_k(r.k) - 1e-6 and r.status == "pass"


def test_maurey_sweep():
    rows = run_sweep(ExperimentConfig(NormSpec(5, 3), [1, 2, 4], mode="maurey_sweep", instances=4))
    assert len(rows) == 12 and all(r.status == "pass" for r in rows)


@pytest.mark.parametrize("kwargs", [
    dict(ks=[]), dict(ks=[0]), dict(ks=[1], mode="bogus"), dict(ks=[1], trials=0), dict(ks=[1], tol=0.0),
    dict(ks=[1], bound="euclidean", space=NormSpec(3, 3)),
])
def test_config_errors(kwargs):
    kwargs.setdefault("space", NormSpec(3, 2))
    with pytest.raises(ValueError):
        ExperimentConfig(**kwargs)


def test_counterexample_mode_needs_linf():
    with pytest.raises(ValueError):
        run_sweep(ExperimentConfig(NormSpec(3, 2), [2], mode="counterexample_check"))


def test_csv_equals_json(l2_rows):
    from_csv = parse_rows(format_rows(l2_rows, "csv"), "csv")
    from_json = parse_rows(format_rows(l2_rows, "json"), "json")
    assert from_csv == from_json
    assert format_rows(l2_rows, "csv").splitlines()[0] == ",".join(CSV_FIELDS)


def test_exit_code_policy():
    row = lambda s: SweepRow(1, 0.5, 1.0, 0.0, 0.0, s)
    assert exit_code([row("pass"), row("uncertified")]) == 0
    assert exit_code([row("pass"), row("violation")]) == 1


def test_thread_count_independence(monkeypatch, l2_rows):
    monkeypatch.setenv("HELLY_THREADS", "3")
    cfg = ExperimentConfig(NormSpec(10, 2), [1, 2, 4, 8, 16], instances=2, bound="euclidean", timing=False)
    again = run_sweep(cfg)
    assert format_rows(again, "csv") == format_rows(l2_rows, "csv")


def run_cli(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cli_counterexample_solve_verify(tmp_path, capsys):
    path = tmp_path / "k1.json"
    code, _, _ = run_cli(["counterexample", "--k", "1", "--out", str(path)], capsys)
    assert code == 0
    code, text, _ = run_cli(["solve", str(path)], capsys)
    assert code == 0
    outcome = json.loads(text)
    assert outcome["objective"] >= 1 - 1e-6 and outcome["certified"]
    code, text, _ = run_cli(["verify", str(path)], capsys)
    assert code == 0 and json.loads(text)["valid"]
    # a certificate claiming more than the construction proves is rejected
    obj = json.loads(path.read_text())
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(dict(obj["certificate"], bound=1.1)))
    code, text, _ = run_cli(["verify", str(path), "--cert", str(bad)], capsys)
    assert code == 1 and not json.loads(text)["valid"]


def test_cli_solved_certificate_verifies(tmp_path, capsys):
    path = tmp_path / "k2.json"
    run_cli(["counterexample", "--k", "2", "--out", str(path)], capsys)
    code, text, _ = run_cli(["solve", str(path)], capsys)
    cert = tmp_path / "cert.json"
    cert.write_text(json.dumps(json.loads(text)["certificate"]))
    code, text, _ = run_cli(["verify", str(path), "--cert", str(cert), "--tol", "1e-6"], capsys)
    assert code == 0


def test_cli_transfer(tmp_path, capsys):
    emb = tmp_path / "emb.json"
    emb.write_text(json.dumps({"space": {"p": "inf", "dim": 4},
                               "matrix": [[1, 0], [0, 1], [0, 0], [0, 0]], "eta": 0}))
    code, text, _ = run_cli(["counterexample", "--k", "1", "--embed", str(emb)], capsys)
    assert code == 0 and abs(json.loads(text)["certificate"]["bound"] - (1 - 1e-9)) <= 1e-15
    emb.write_text(json.dumps({"space": {"p": "inf", "dim": 2}, "matrix": [[1.5, 0], [0, 1]], "eta": 0}))
    code, _, err = run_cli(["counterexample", "--k", "1", "--embed", str(emb)], capsys)
    assert code == 3 and "exceeds 1" in err


def test_cli_maurey(tmp_path, capsys):
    cloud = tmp_path / "cloud.json"
    cloud.write_text(json.dumps({"points": [[1.0], [-1.0]], "weights": [0.5, 0.5]}))
    code, text, _ = run_cli(["maurey", str(cloud), "--k", "2", "--p", "1"], capsys)
    assert code == 0 and json.loads(text)["norm"] == 0.0
    code, _, err = run_cli(["maurey", str(cloud)], capsys)
    assert code == 3 and "--k" in err
    group = tmp_path / "group.json"
    group.write_text(json.dumps({"colors": [{"points": [[1.0]], "weights": [1.0]},
                                            {"points": [[-1.0]], "weights": [1.0]}]}))
    code, text, _ = run_cli(["maurey", str(group), "--p", "1"], capsys)
    assert code == 0 and json.loads(text)["norm"] == 0.0


def test_cli_sweep_deterministic(capsys):
    argv = ["sweep", "--p", "3", "--dim", "4", "--k", "1-3", "--instances", "2", "--no-timing"]
    code1, a, _ = run_cli(argv, capsys)
    code2, b, _ = run_cli(argv + ["--seed", "0"], capsys)
    assert code1 == code2 == 0 and a == b
    code, c, _ = run_cli(argv + ["--format", "json"], capsys)
    assert parse_rows(a, "csv") == parse_rows(c, "json")


def test_cli_sweep_counterexample_mode(capsys):
    code, text, _ = run_cli(["sweep", "--mode", "counterexample_check", "--k", "2,3"], capsys)
    assert code == 0
    rows = parse_rows(text, "csv")
    assert [r["status"] for r in rows] == ["pass", "pass"]


def test_cli_usage_errors(capsys):
    code, _, err = run_cli(["sweep", "--mode", "bogus"], capsys)
    assert code == 2 and "usage" in err
    code, _, err = run_cli(["frobnicate"], capsys)
    assert code == 2
    code, _, err = run_cli(["sweep", "--k", ""], capsys)
    assert code == 3 and "empty" in err


def test_cli_input_errors(tmp_path, capsys):
    code, _, err = run_cli(["solve", str(tmp_path / "missing.json")], capsys)
    assert code == 3 and "cannot read" in err
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    code, _, err = run_cli(["solve", str(broken)], capsys)
    assert code == 3 and "invalid JSON" in err
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"space": {"p": 2, "dim": 2},
                               "colors": [[{"vertices": [[0.0, 0.0], [1.0]]}]]}))
    code, _, err = run_cli(["solve", str(bad)], capsys)
    assert code == 3 and "$.colors[0][0].vertices[1]" in err
    code, _, err = run_cli(["verify", str(bad)], capsys)
    assert code == 3


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "hellyapprox", "counterexample", "--k", "1"],
                         capture_output=True, text=True, timeout=120)
    assert res.returncode == 0
    obj = json.loads(res.stdout)
    assert obj["space"] == {"p": "inf", "dim": 2} and obj["certificate"]["bound"] == 1.0


def test_linf_constant_flag(capsys):
    argv = ["sweep", "--mode", "maurey_sweep", "--p", "inf", "--dim", "4", "--k", "2", "--instances", "1",
            "--no-timing"]
    _, base, _ = run_cli(argv, capsys)
    _, wide, _ = run_cli(argv + ["--linf-constant", "3"], capsys)
    b, w = parse_rows(base, "csv")[0], parse_rows(wide, "csv")[0]
    assert b["empirical"] == w["empirical"]
    assert abs(w["bound"] / b["bound"] - 1.5) <= 1e-12
    code, _, _ = run_cli(argv + ["--linf-constant", "-1"], capsys)
    assert code == 3
