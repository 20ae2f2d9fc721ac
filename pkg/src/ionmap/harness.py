"""Policy comparison runs over circuit suites and their reports."""

from __future__ import annotations

import configparser
import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Sequence

from .circuit import Circuit, CircuitStats, circuit_stats
from .placement import Mapping, TrapTopology, place
from .qccd import LOOKAHEAD, FidelityModel, simulate
from .weighting import POLICY_KINDS, InteractionGraph, PolicyParams, WeightPolicy, compute_weights

log = logging.getLogger(__name__)

__all__ = [
    "ConfigError",
    "RunConfig",
    "CircuitRecord",
    "Aggregate",
    "BenchReport",
    "load_config",
    "compile_circuit",
    "evaluate",
    "run_compare",
    "aggregate",
    "emit_report",
    "report_from_json",
    "records_from_csv",
]

NOTES = (
    "circuits are structural stand-ins, not the original benchmark files",
    "shuttles count inter-trap segment hops; moves count ion transfers",
    "fidelity values are model-relative; compare ratios between policies only",
    "trap capacity beyond the initial load is an assumption (communication capacity)",
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    topology: TrapTopology = field(default_factory=TrapTopology)
    fidelity: FidelityModel = field(default_factory=FidelityModel)
    params: PolicyParams = field(default_factory=PolicyParams)
    policies: tuple[str, ...] = ("greedy", "step", "linear", "exp", "penalized")
    baseline: str = "greedy"
    suite: str = "random120"
    seed: int = 2022
    out: str = "report.json"
    jobs: int = 1
    lookahead: int = LOOKAHEAD
    timing_repeats: int = 1

    def __post_init__(self):
        for p in self.policies + (self.baseline,):
            if WeightPolicy(p).kind not in POLICY_KINDS:
                raise ConfigError(f"unknown policy {p!r}")
        if self.jobs < 1 or self.timing_repeats < 1 or self.lookahead < 0:
            raise ConfigError("jobs and timing_repeats must be >= 1, lookahead >= 0")

    @property
    def all_policies(self) -> tuple[str, ...]:
        """Baseline first, then the candidates, without duplicates."""
        out = [self.baseline]
        out += [p for p in self.policies if p != self.baseline]
        return tuple(out)

    def policy(self, kind: str) -> WeightPolicy:
        return WeightPolicy(kind, self.params)

    def describe(self) -> dict:
        return {
            "topology": asdict(self.topology),
            "fidelity": asdict(self.fidelity),
            "params": asdict(self.params),
            "policies": list(self.all_policies),
            "baseline": self.baseline,
            "seed": self.seed,
            "lookahead": self.lookahead,
        }


_SECTIONS = {
    "topology": {"traps": ("num_traps", int), "capacity": ("trap_capacity", int), "load": ("initial_load", int)},
    "fidelity": {f.name.lower(): (f.name, float) for f in fields(FidelityModel)},
    "policy": {
        "step_blocks": ("n_blocks", int),
        "n_blocks": ("n_blocks", int),
        "a_linear": ("a_linear", float),
        "a_exp": ("a_exp", float),
    },
}


def load_config(path: str | Path | None = None, base: RunConfig | None = None, **overrides) -> RunConfig:
    """Build a RunConfig from an INI/TOML-style ``[section] key = value`` file.

    Sections: ``[topology]`` traps/capacity/load, ``[fidelity]`` gamma/tau/A/
    heat_per_shuttle/n0/shuttle_time, ``[policy]`` policies/baseline/step_blocks/
    a_linear/a_exp, ``[run]`` suite/seed/out/jobs/lookahead/timing_repeats.
    Keyword overrides are applied last; ``None`` values are ignored.
    """
    cfg = base or RunConfig()
    parts = {
        "topology": asdict(cfg.topology),
        "fidelity": asdict(cfg.fidelity),
        "policy": asdict(cfg.params),
    }
    top: dict = {}
    if path is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for section in parser.sections():
            for key, raw in parser.items(section):
                raw = raw.strip().strip('"').strip("'")
                try:
                    if section in _SECTIONS and key in _SECTIONS[section]:
                        name, conv = _SECTIONS[section][key]
                        parts[section][name] = conv(raw)
                    elif section == "policy" and key == "policies":
                        items = raw.strip("[]").split(",")
                        top[key] = tuple(s.strip().strip("\"'") for s in items if s.strip())
                    elif section == "policy" and key == "baseline":
                        top[key] = raw
                    elif section == "run" and key in ("suite", "out"):
                        top[key] = raw
                    elif section == "run" and key in ("seed", "jobs", "lookahead", "timing_repeats"):
                        top[key] = int(raw)
                    else:
                        raise ConfigError(f"unknown config key [{section}] {key}")
                except ValueError as exc:
                    raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc

    for key, value in overrides.items():
        if value is None:
            continue
        if key in ("traps", "capacity", "load"):
            parts["topology"][_SECTIONS["topology"][key][0]] = value
        elif key in ("step_blocks", "a_linear", "a_exp"):
            parts["policy"][_SECTIONS["policy"][key][0]] = value
        else:
            top[key] = value
    try:
        return replace(
            cfg,
            topology=TrapTopology(**parts["topology"]),
            fidelity=FidelityModel(**parts["fidelity"]),
            params=PolicyParams(**parts["policy"]),
            **top,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


# ---------------------------------------------------------------- per-circuit work

def compile_circuit(
    c: Circuit, policy: WeightPolicy, topo: TrapTopology, stats: CircuitStats | None = None
) -> tuple[InteractionGraph, Mapping, float]:
    """Edge weights and initial placement; returns the wall time spent on both.

    Circuit statistics are a per-circuit analysis shared by all policies; when
    ``stats`` is given they are not part of the timed region.
    """
    t0 = time.perf_counter()
    graph = compute_weights(c, policy, stats)
    mapping = place(graph, topo)
    return graph, mapping, time.perf_counter() - t0


@dataclass(frozen=True)
class CircuitRecord:
    name: str
    Q: int
    G: int
    D: int
    S: int
    policy: str
    shuttles: int | None = None
    moves: int | None = None
    program_fidelity: float | None = None
    log_fidelity: float | None = None
    exec_time: float | None = None
    compile_time: float | None = None
    error: str = ""

    @property
    def ok(self) -> bool:
        return not self.error


def evaluate(c: Circuit, cfg: RunConfig, stats: CircuitStats | None = None) -> list[CircuitRecord]:
    """All configured policies on one circuit. Failures become records, not exceptions."""
    stats = stats or circuit_stats(c)
    base = dict(name=c.name, Q=stats.Q, G=stats.G, D=stats.D, S=stats.S)
    out = []
    for kind in cfg.all_policies:
        policy = cfg.policy(kind)
        try:
            times = []
            for _ in range(cfg.timing_repeats):
                _, mapping, dt = compile_circuit(c, policy, cfg.topology, stats)
                times.append(dt)
            res = simulate(c, mapping, cfg.topology, cfg.fidelity, lookahead=cfg.lookahead, check=False)
        except Exception as exc:  # recorded per circuit, the run goes on
            log.warning("%s/%s failed: %s", c.name, kind, exc)
            out.append(CircuitRecord(**base, policy=kind, error=f"{type(exc).__name__}: {exc}"))
            continue
        out.append(
            CircuitRecord(
                **base,
                policy=kind,
                shuttles=res.shuttle_count,
                moves=res.move_count,
                program_fidelity=res.program_fidelity,
                log_fidelity=res.log_fidelity,
                exec_time=res.wall_time,
                compile_time=min(times),
            )
        )
    return out


# ---------------------------------------------------------------- aggregation

@dataclass(frozen=True)
class Aggregate:
    policy: str
    baseline: str
    circuits: int
    circuits_with_fewer_shuttles: int
    circuits_with_more: int
    ties: int
    avg_reduction: float
    avg_increase: float
    avg_delta_all: float
    net_reduction: int
    net_pct_reduction: float
    avg_fidelity_ratio: float
    max_fidelity_ratio: float
    geo_mean_fidelity_ratio: float


def _ratio(log_c: float, log_b: float) -> float:
    if log_c == log_b:
        return 1.0
    d = log_c - log_b
    if math.isnan(d):
        return math.nan
    return math.exp(d) if d < 709 else math.inf


def aggregate(records: Iterable[CircuitRecord], baseline: str = "greedy") -> list[Aggregate]:
    """Compare every policy against ``baseline`` over circuits where both succeeded."""
    by_policy: dict[str, dict[str, CircuitRecord]] = {}
    for r in records:
        if r.ok:
            by_policy.setdefault(r.policy, {})[r.name] = r
    base = by_policy.get(baseline, {})
    out = []
    for policy in sorted(by_policy, key=lambda p: (p != baseline, p)):
        cand = by_policy[policy]
        names = sorted(set(cand) & set(base))
        deltas = [base[n].shuttles - cand[n].shuttles for n in names]
        ratios = [_ratio(cand[n].log_fidelity, base[n].log_fidelity) for n in names]
        logs = [cand[n].log_fidelity - base[n].log_fidelity for n in names]
        gains = [d for d in deltas if d > 0]
        losses = [-d for d in deltas if d < 0]
        total_base = sum(base[n].shuttles for n in names)
        finite_logs = [x for x in logs if math.isfinite(x)]
        out.append(
            Aggregate(
                policy=policy,
                baseline=baseline,
                circuits=len(names),
                circuits_with_fewer_shuttles=len(gains),
                circuits_with_more=len(losses),
                ties=len(deltas) - len(gains) - len(losses),
                avg_reduction=sum(gains) / len(gains) if gains else 0.0,
                avg_increase=sum(losses) / len(losses) if losses else 0.0,
                avg_delta_all=sum(deltas) / len(deltas) if deltas else 0.0,
                net_reduction=sum(deltas),
                net_pct_reduction=100.0 * sum(deltas) / total_base if total_base else 0.0,
                avg_fidelity_ratio=sum(ratios) / len(ratios) if ratios else 1.0,
                max_fidelity_ratio=max(ratios) if ratios else 1.0,
                geo_mean_fidelity_ratio=(
                    math.exp(min(sum(finite_logs) / len(finite_logs), 709)) if finite_logs else 1.0
                ),
            )
        )
    return out


@dataclass
class BenchReport:
    records: list[CircuitRecord]
    baseline: str = "greedy"
    config: dict = field(default_factory=dict)
    suite: str = ""

    def __post_init__(self):
        self.records = sorted(self.records, key=lambda r: (r.name, r.policy))

    @property
    def aggregates(self) -> list[Aggregate]:
        return aggregate(self.records, self.baseline)

    @property
    def failures(self) -> list[CircuitRecord]:
        return [r for r in self.records if not r.ok]


def _evaluate_job(args):
    c, cfg = args
    return evaluate(c, cfg)


def run_compare(cfg: RunConfig, circuits: Sequence[Circuit] | None = None) -> BenchReport:
    """Weights, placement and simulation for every circuit x policy.

    ``circuits`` defaults to the suite named or stored at ``cfg.suite``.
    """
    if circuits is None:
        from .benchgen import build_suite, load_suite

        path = Path(cfg.suite)
        circuits = load_suite(path) if path.exists() else build_suite(cfg.suite, cfg.seed).build()
    if cfg.jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            chunks = list(pool.map(_evaluate_job, [(c, cfg) for c in circuits]))
    else:
        chunks = [evaluate(c, cfg) for c in circuits]
    records = [r for chunk in chunks for r in chunk]
    return BenchReport(records, cfg.baseline, cfg.describe(), suite=cfg.suite)


# ---------------------------------------------------------------- rendering

_RECORD_FIELDS = [f.name for f in fields(CircuitRecord)]
_TIMING_FIELDS = ("compile_time",)


def _jsonable(x):
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)  # 'inf', '-inf', 'nan'
    return x


def _record_dict(r: CircuitRecord, timing: bool) -> dict:
    d = asdict(r)
    if not timing:
        for k in _TIMING_FIELDS:
            d.pop(k)
    return {k: _jsonable(v) for k, v in d.items()}


def _fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        return f"{x:.4g}"
    return str(x)


def _table(rows: list[list], header: list[str]) -> str:
    cells = [header] + [[_fmt(x) for x in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.rjust(w) for c, w in zip(row, widths)) for row in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines)


_AGG_ROWS = [
    ("circuits_with_fewer_shuttles", "# of ckts w/ fewer shuttles"),
    ("avg_reduction", "Avg. reduction (improved ckts)"),
    ("circuits_with_more", "# of ckts w/ more shuttles"),
    ("avg_increase", "Avg. increase (worsened ckts)"),
    ("ties", "# of ties"),
    ("avg_delta_all", "Avg. reduction (all ckts)"),
    ("net_reduction", "Net reduction in shuttles"),
    ("net_pct_reduction", "Net % reduction"),
    ("avg_fidelity_ratio", "Avg. fidelity ratio"),
    ("geo_mean_fidelity_ratio", "Geo-mean fidelity ratio"),
    ("max_fidelity_ratio", "Max. fidelity ratio"),
]


def emit_report(report: BenchReport, format: str = "table-text", timing: bool = False) -> str:
    """Render a report as ``table-text``, ``csv`` (records) or ``json``.

    Wall-clock fields are left out unless ``timing`` is set, so that equal
    inputs render to equal bytes.
    """
    if format == "json":
        doc = {
            "suite": report.suite,
            "baseline": report.baseline,
            "config": report.config,
            "notes": list(NOTES),
            "records": [_record_dict(r, timing) for r in report.records],
            "aggregates": [{k: _jsonable(v) for k, v in asdict(a).items()} for a in report.aggregates],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if format == "csv":
        cols = [c for c in _RECORD_FIELDS if timing or c not in _TIMING_FIELDS]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in report.records:
            d = asdict(r)
            w.writerow(["" if d[c] is None else repr(d[c]) if isinstance(d[c], float) else d[c] for c in cols])
        return buf.getvalue()
    if format == "table-text":
        cols = ["name", "Q", "G", "D", "S", "policy", "shuttles", "moves", "log_fidelity"]
        if timing:
            cols.append("compile_time")
        rows = [[getattr(r, c) for c in cols] for r in report.records]
        out = [_table(rows, cols)]
        aggs = [a for a in report.aggregates if a.policy != report.baseline]
        if aggs:
            header = ["metric"] + [a.policy for a in aggs]
            arows = [[label] + [getattr(a, key) for a in aggs] for key, label in _AGG_ROWS]
            out.append(f"\nbaseline: {report.baseline}\n" + _table(arows, header))
        return "\n".join(out) + "\n"
    raise ValueError(f"unknown report format {format!r}")


def _unjson(x):
    if isinstance(x, str) and x in ("inf", "-inf", "nan"):
        return float(x)
    return x


def report_from_json(text: str) -> BenchReport:
    doc = json.loads(text)
    records = [CircuitRecord(**{k: _unjson(v) for k, v in r.items()}) for r in doc["records"]]
    return BenchReport(records, doc["baseline"], doc.get("config", {}), doc.get("suite", ""))


_CSV_TYPES = {"Q": int, "G": int, "D": int, "S": int, "shuttles": int, "moves": int}


def records_from_csv(text: str) -> list[CircuitRecord]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        kw = {}
        for k, v in row.items():
            if k in ("name", "policy", "error"):
                kw[k] = v
            elif v == "":
                kw[k] = None
            else:
                kw[k] = _CSV_TYPES.get(k, float)(v)
        out.append(CircuitRecord(**kw))
    return out
