"""Command-line entry point: ``ionmap {map,sim,bench} ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .benchgen import build_suite, write_suite
from .circuit import CircuitError, circuit_stats, parse_circuit
from .harness import ConfigError, emit_report, load_config, report_from_json, run_compare
from .placement import PlacementError
from .qccd import DeadlockError, simulate
from .weighting import POLICY_KINDS

EXIT_OK, EXIT_CONFIG, EXIT_FAILURES = 0, 2, 3


def _global_options() -> argparse.ArgumentParser:
    # SUPPRESS lets the flags appear before or after the subcommand.
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    S = argparse.SUPPRESS
    g.add_argument("--config", metavar="FILE", default=S, help="[section] key=value config file")
    g.add_argument("--policy", choices=POLICY_KINDS + ("exponential",), default=S)
    g.add_argument("--traps", type=int, default=S)
    g.add_argument("--capacity", type=int, default=S)
    g.add_argument("--load", type=int, default=S)
    g.add_argument("--seed", type=int, default=S)
    g.add_argument("--format", default=S, help="output format (json, table-text, csv)")
    g.add_argument("--step-blocks", type=int, default=S)
    g.add_argument("--a-linear", type=float, default=S)
    g.add_argument("--a-exp", type=float, default=S)
    g.add_argument("-v", "--verbose", action="store_true", default=S)
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(prog="ionmap", description=__doc__, parents=[common])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("map", parents=[common], help="weights and initial mapping for one circuit")
    p.add_argument("circuit", help="circuit file")
    p.add_argument("--input-format", default=None, help="ms-text or qasm2-subset (default: by suffix)")

    p = sub.add_parser("sim", parents=[common], help="simulate one circuit under a policy")
    p.add_argument("circuit")
    p.add_argument("--input-format", default=None)
    p.add_argument("--trace", metavar="FILE", help="write shuttle events as JSON lines")

    bench = sub.add_parser("bench", parents=[common], help="benchmark suites")
    bsub = bench.add_subparsers(dest="bench_command", required=True)
    p = bsub.add_parser("gen", parents=[common], help="write a generated suite")
    p.add_argument("--suite", default="random120", help="random120, named or random<N>")
    p.add_argument("--out", required=True, type=Path)
    p = bsub.add_parser("run", parents=[common], help="compare policies over a suite")
    p.add_argument("--suite", default=None, help="suite directory or generated suite name")
    p.add_argument("--out", default=None, help="json report path (default: stdout)")
    p.add_argument("--policies", default=None, help="comma-separated candidate policies")
    p.add_argument("--baseline", default=None)
    p.add_argument("--jobs", type=int, default=None)
    p.add_argument("--timings", metavar="FILE", help="also write a csv including compile times")
    p = bsub.add_parser("report", parents=[common], help="render a saved json report")
    p.add_argument("report", type=Path)
    return parser


def _config(args):
    return load_config(
        getattr(args, "config", None),
        traps=getattr(args, "traps", None),
        capacity=getattr(args, "capacity", None),
        load=getattr(args, "load", None),
        seed=getattr(args, "seed", None),
        step_blocks=getattr(args, "step_blocks", None),
        a_linear=getattr(args, "a_linear", None),
        a_exp=getattr(args, "a_exp", None),
    )


def _read_circuit(path: str, fmt: str | None):
    p = Path(path)
    if fmt is None:
        fmt = "qasm2-subset" if p.suffix.lower() == ".qasm" else "ms-text"
    return parse_circuit(p.read_text(), fmt, name=p.stem)


def _compile(args, cfg):
    from .harness import compile_circuit

    c = _read_circuit(args.circuit, args.input_format)
    policy = cfg.policy(getattr(args, "policy", "greedy"))
    graph, mapping, dt = compile_circuit(c, policy, cfg.topology)
    return c, policy, graph, mapping, dt


def cmd_map(args, cfg) -> int:
    c, policy, graph, mapping, dt = _compile(args, cfg)
    doc = {
        "circuit": c.name,
        "stats": circuit_stats(c).as_dict(),
        **policy.describe(),
        "weights": [[a, b, w] for (a, b), w in sorted(graph.edges.items())],
        "mapping": mapping.as_dict(),
    }
    if getattr(args, "format", "json") == "json":
        print(json.dumps(doc, indent=2))
    else:
        print(f"{c.name}: {doc['stats']} policy={policy.kind}")
        for (a, b), w in sorted(graph.edges.items(), key=lambda kv: (-kv[1], kv[0])):
            print(f"  wt({a},{b}) = {w:g}")
        for trap, chain in doc["mapping"].items():
            print(f"  {trap}: {chain}")
    return EXIT_OK


def cmd_sim(args, cfg) -> int:
    c, policy, graph, mapping, dt = _compile(args, cfg)
    res = simulate(c, mapping, cfg.topology, cfg.fidelity, lookahead=cfg.lookahead)
    doc = {"circuit": c.name, **policy.describe(), **res.summary(), "initial_mapping": mapping.as_dict()}
    print(json.dumps(doc, indent=2))
    if args.trace:
        Path(args.trace).write_text(res.trace.to_jsonl())
    return EXIT_OK


def cmd_bench(args, cfg) -> int:
    if args.bench_command == "gen":
        seed = getattr(args, "seed", cfg.seed)
        manifest = build_suite(args.suite, seed)
        paths = write_suite(manifest, args.out)
        print(f"wrote {len(paths)} circuits and manifest.json to {args.out}")
        return EXIT_OK
    if args.bench_command == "run":
        overrides = {}
        if args.suite:
            overrides["suite"] = args.suite
        if args.policies:
            overrides["policies"] = tuple(p.strip() for p in args.policies.split(",") if p.strip())
        if args.baseline:
            overrides["baseline"] = args.baseline
        if args.jobs:
            overrides["jobs"] = args.jobs
        cfg = load_config(None, base=cfg, **overrides)
        report = run_compare(cfg)
        text = emit_report(report, getattr(args, "format", "json"))
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        if args.timings:
            Path(args.timings).write_text(emit_report(report, "csv", timing=True))
        for r in report.failures:
            print(f"FAILED {r.name}/{r.policy}: {r.error}", file=sys.stderr)
        return EXIT_FAILURES if report.failures else EXIT_OK
    if args.bench_command == "report":
        report = report_from_json(args.report.read_text())
        sys.stdout.write(emit_report(report, getattr(args, "format", "table-text")))
        return EXIT_OK
    raise AssertionError(args.bench_command)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING)
    try:
        cfg = _config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    handlers = {"map": cmd_map, "sim": cmd_sim, "bench": cmd_bench}
    try:
        return handlers[args.command](args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (CircuitError, PlacementError, DeadlockError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURES


if __name__ == "__main__":
    sys.exit(main())
