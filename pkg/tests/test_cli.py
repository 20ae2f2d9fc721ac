import json

import pytest

from ionmap.cli import EXIT_CONFIG, EXIT_FAILURES, EXIT_OK, main

from .conftest import sample_text


@pytest.fixture
def sample_file(tmp_path):
    p = tmp_path / "sample6.ms"
    p.write_text(sample_text())
    return p


def test_map_json(sample_file, capsys):
    assert main(["map", str(sample_file), "--traps", "2", "--capacity", "4", "--load", "3"]) == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["mapping"] == {"T0": [0, 1, 2], "T1": [3, 4, 5]}
    assert doc["stats"] == {"G": 10, "Q": 6, "D": 6, "S": 1}
    assert [0, 1, 4] in doc["weights"] and doc["policy"] == "greedy"


def test_map_step_text(sample_file, capsys):
    argv = ["--policy", "step", "--step-blocks", "2", "map", str(sample_file), "--format", "table-text"]
    assert main(argv + ["--traps", "2", "--capacity", "4", "--load", "3"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "wt(0,1) = 13" in out and "wt(1,2) = 11" in out and "T0: [0, 1, 2]" in out


def test_sim_with_trace(sample_file, tmp_path, capsys):
    trace = tmp_path / "t.jsonl"
    assert main(["sim", str(sample_file), "--traps", "2", "--capacity", "4", "--load", "3", "--trace", str(trace)]) == 0
    doc = json.loads(capsys.readouterr().out)
    first = json.loads(trace.read_text().splitlines()[0])
    assert (first["ion"], first["source"], first["dest"], first["gate"]) == (2, 0, 1, 2)
    assert doc["shuttle_count"] == sum(json.loads(l)["hops"] for l in trace.read_text().splitlines())


def test_qasm_input(tmp_path, capsys):
    p = tmp_path / "c.qasm"
    p.write_text("OPENQASM 2.0;\nqreg q[3];\nh q[0];\ncx q[0], q[2];\n")
    assert main(["map", str(p)]) == EXIT_OK
    assert json.loads(capsys.readouterr().out)["weights"] == [[0, 2, 1]]


def test_bench_gen_run_report(tmp_path, capsys):
    suite = tmp_path / "suite"
    assert main(["bench", "gen", "--suite", "random2", "--seed", "5", "--out", str(suite)]) == EXIT_OK
    assert (suite / "manifest.json").exists() and len(list(suite.glob("*.ms"))) == 2
    out, timings = tmp_path / "r.json", tmp_path / "t.csv"
    argv = ["bench", "run", "--suite", str(suite), "--out", str(out), "--policies", "penalized,linear",
            "--timings", str(timings)]
    assert main(argv) == EXIT_OK
    doc = json.loads(out.read_text())
    assert {r["policy"] for r in doc["records"]} == {"greedy", "penalized", "linear"}
    assert "compile_time" not in doc["records"][0] and "compile_time" in timings.read_text()
    capsys.readouterr()
    assert main(["bench", "report", str(out)]) == EXIT_OK
    assert "Net % reduction" in capsys.readouterr().out


def test_exit_codes(sample_file, tmp_path, capsys):
    assert main(["map", str(sample_file), "--load", "20"]) == EXIT_CONFIG
    bad = tmp_path / "bad.ini"
    bad.write_text("[nope]\nx = 1\n")
    assert main(["--config", str(bad), "map", str(sample_file)]) == EXIT_CONFIG
    broken = tmp_path / "broken.ms"
    broken.write_text("qubits 2\nMS q[0], q[0]\n")
    assert main(["map", str(broken)]) == EXIT_FAILURES
    assert "line 2" in capsys.readouterr().err
    assert main(["map", str(sample_file), "--traps", "1", "--capacity", "4", "--load", "3"]) == EXIT_FAILURES


def test_bench_run_with_failures_exits_nonzero(tmp_path, capsys):
    suite = tmp_path / "s"
    suite.mkdir()
    (suite / "big.ms").write_text("qubits 9\nMS q[0], q[8]\n")
    argv = ["bench", "run", "--suite", str(suite), "--traps", "2", "--capacity", "4", "--load", "3"]
    assert main(argv) == EXIT_FAILURES
    assert "FAILED big/" in capsys.readouterr().err
