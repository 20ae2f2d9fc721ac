import json
import math

import pytest

from ionmap import Circuit
from ionmap.benchgen import gen_qaoa, gen_qft, gen_random, RandomSpec
from ionmap.harness import (
    CircuitRecord,
    BenchReport,
    ConfigError,
    RunConfig,
    aggregate,
    emit_report,
    load_config,
    records_from_csv,
    report_from_json,
    run_compare,
)

SMALL = dict(traps=3, capacity=6, load=5)


def small_cfg(**kw) -> RunConfig:
    return load_config(None, **{**SMALL, **kw})


def small_random(n=3):
    return [
        gen_random(RandomSpec(seed=s, qubit_range=(10, 14), gate_range=(40, 80)), name=f"r{s}") for s in range(n)
    ]


def test_config_file(tmp_path):
    p = tmp_path / "run.ini"
    p.write_text(
        "[topology]\ntraps = 4\ncapacity = 9\nload = 7\n"
        "[fidelity]\nA = 0.002  # coupling\nheat_per_shuttle = 0.5\n"
        "[policy]\npolicies = [\"penalized\", \"linear\"]\nbaseline = greedy\nstep_blocks = 4\n"
        "[run]\nseed = 9\njobs = 2\n"
    )
    cfg = load_config(p, traps=5)
    assert (cfg.topology.num_traps, cfg.topology.trap_capacity, cfg.topology.initial_load) == (5, 9, 7)
    assert cfg.fidelity.A == 0.002 and cfg.fidelity.heat_per_shuttle == 0.5
    assert cfg.policies == ("penalized", "linear") and cfg.params.n_blocks == 4
    assert (cfg.seed, cfg.jobs) == (9, 2)
    assert cfg.all_policies == ("greedy", "penalized", "linear")


@pytest.mark.parametrize(
    "text",
    ["[topology]\nload = 17\n", "[fidelity]\nA = -1\n", "[policy]\npolicies = magic\n", "[run]\ncolour = red\n",
     "[topology]\ntraps = six\n", "not ini"],
)
def test_config_errors(tmp_path, text):
    p = tmp_path / "bad.ini"
    p.write_text(text)
    with pytest.raises(ConfigError):
        load_config(p)


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.ini")


def test_self_comparison_is_neutral():
    rep = run_compare(small_cfg(policies=("greedy",), baseline="greedy"), small_random())
    (agg,) = rep.aggregates
    assert agg.net_reduction == 0 and agg.ties == 3
    assert agg.avg_fidelity_ratio == agg.max_fidelity_ratio == agg.geo_mean_fidelity_ratio == 1.0


def test_symmetric_suite_has_zero_net_reduction():
    circuits = [gen_qft(12, name="qft"), gen_qaoa(14, 3, 0.3, seed=1, name="qaoa")]
    rep = run_compare(small_cfg(policies=("penalized",)), circuits)
    agg = next(a for a in rep.aggregates if a.policy == "penalized")
    assert agg.net_reduction == 0 and agg.ties == 2
    assert agg.avg_fidelity_ratio == 1.0


def _rec(name, policy, shuttles, logf):
    return CircuitRecord(name, 4, 10, 5, 1, policy, shuttles, shuttles, math.exp(logf), logf, 10.0, 0.0)


def test_aggregate_arithmetic():
    recs = [
        _rec("a", "greedy", 10, -1.0), _rec("a", "penalized", 6, -0.5),
        _rec("b", "greedy", 10, -1.0), _rec("b", "penalized", 12, -1.2),
        _rec("c", "greedy", 20, -2.0), _rec("c", "penalized", 20, -2.0),
    ]
    base, pen = aggregate(recs)
    assert base.policy == "greedy" and pen.policy == "penalized"
    assert (pen.circuits_with_fewer_shuttles, pen.circuits_with_more, pen.ties) == (1, 1, 1)
    assert pen.avg_reduction == 4 and pen.avg_increase == 2
    assert pen.net_reduction == 2 and pen.avg_delta_all == pytest.approx(2 / 3)
    assert pen.net_pct_reduction == pytest.approx(5.0)
    ratios = [math.exp(0.5), math.exp(-0.2), 1.0]
    assert pen.avg_fidelity_ratio == pytest.approx(sum(ratios) / 3)
    assert pen.max_fidelity_ratio == pytest.approx(math.exp(0.5))
    assert pen.geo_mean_fidelity_ratio == pytest.approx(math.exp(0.1))


def test_aggregate_skips_failures_and_one_record():
    recs = [_rec("a", "greedy", 7, -1.0), _rec("a", "linear", 4, -0.9),
            CircuitRecord("b", 4, 10, 5, 1, "linear", error="DeadlockError: full")]
    rep = BenchReport(recs)
    lin = rep.aggregates[1]
    assert lin.circuits == 1 and lin.net_reduction == 3 and lin.avg_delta_all == 3
    assert len(rep.failures) == 1


def test_empty_report_renders_header_only():
    text = emit_report(BenchReport([]), "table-text")
    assert text.splitlines()[0].split() == ["name", "Q", "G", "D", "S", "policy", "shuttles", "moves", "log_fidelity"]
    assert len(text.splitlines()) == 2
    assert emit_report(BenchReport([]), "csv").count("\n") == 1


def test_json_and_csv_round_trip():
    rep = run_compare(small_cfg(), small_random(2))
    again = report_from_json(emit_report(rep, "json"))
    assert [r.shuttles for r in again.records] == [r.shuttles for r in rep.records]
    assert all(r.compile_time is None for r in again.records)
    timed = records_from_csv(emit_report(rep, "csv", timing=True))
    assert timed == rep.records
    assert "Net % reduction" in emit_report(rep, "table-text")


def test_infinite_ratio_serialises():
    recs = [_rec("a", "greedy", 10, -800.0), _rec("a", "exp", 1, -1.0)]
    doc = json.loads(emit_report(BenchReport(recs), "json"))
    assert doc["aggregates"][1]["max_fidelity_ratio"] == "inf"
    assert math.isinf(report_from_json(json.dumps(doc)).aggregates[1].max_fidelity_ratio)


def test_failures_are_recorded():
    c = Circuit.from_pairs(20, [(0, 1)])
    rep = run_compare(small_cfg(traps=2, capacity=6, load=5), [c])
    assert len(rep.failures) == len(rep.records) == 5
    assert all("PlacementError" in r.error for r in rep.failures)


def test_parallel_matches_serial():
    circuits = small_random(3)
    a = emit_report(run_compare(small_cfg(), circuits), "json")
    b = emit_report(run_compare(small_cfg(jobs=2), circuits), "json")
    assert a == b.replace('"jobs": 2', '"jobs": 1')
