"""Policy comparison over the seeded 120-circuit random suite (L6, 15 ions per trap).

    python3 scripts/run_random.py [--seed 2022] [--jobs 4] [--out report.json]
"""

from __future__ import annotations

import argparse
import time
from pathlib import Path

from ionmap.harness import emit_report, load_config, run_compare


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=2022)
    ap.add_argument("--suite", default="random120")
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--out", type=Path, help="also save the json report here")
    args = ap.parse_args()

    cfg = load_config(None, seed=args.seed, suite=args.suite, jobs=args.jobs)
    t0 = time.perf_counter()
    report = run_compare(cfg)
    elapsed = time.perf_counter() - t0
    text = emit_report(report, "table-text")
    print(text[text.index("baseline:") :])
    print(f"{len(report.records)} runs in {elapsed:.1f} s, {len(report.failures)} failures")
    if args.out:
        args.out.write_text(emit_report(report, "json"))


if __name__ == "__main__":
    main()
