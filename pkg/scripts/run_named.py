"""Named-benchmark stand-ins: shuttles per policy and compile-time overhead.

    python3 scripts/run_named.py [--seed 2022] [--repeats 21]
"""

from __future__ import annotations

import argparse

from ionmap import TrapTopology, WeightPolicy, circuit_stats, simulate
from ionmap.benchgen import named_suite
from ionmap.harness import compile_circuit

POLICIES = ("greedy", "linear", "exp", "penalized")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--seed", type=int, default=2022)
    ap.add_argument("--repeats", type=int, default=21, help="best-of-N compile timing")
    args = ap.parse_args()
    topo = TrapTopology()

    print(f"{'circuit':<11}{'Q':>4}{'G':>6}{'D':>5}{'S':>3}" + "".join(f"{p:>11}" for p in POLICIES) + "   delta(pen)")
    timing = []
    for c in named_suite(args.seed).build():
        st = circuit_stats(c)
        shuttles, best = {}, {p: float("inf") for p in POLICIES}
        for _ in range(args.repeats):
            for p in POLICIES:
                _, mapping, dt = compile_circuit(c, WeightPolicy(p), topo, st)
                best[p] = min(best[p], dt)
        for p in POLICIES:
            _, mapping, _ = compile_circuit(c, WeightPolicy(p), topo, st)
            shuttles[p] = simulate(c, mapping, topo, check=False).shuttle_count
        delta = shuttles["greedy"] - shuttles["penalized"]
        row = f"{c.name:<11}{st.Q:>4}{st.G:>6}{st.D:>5}{st.S:>3}" + "".join(f"{shuttles[p]:>11}" for p in POLICIES)
        print(row + f"{delta:>13}")
        timing.append((c.name, best))

    print("\ncompile time (weights + placement, best of %d), ms" % args.repeats)
    print(f"{'circuit':<11}" + "".join(f"{p:>11}" for p in POLICIES) + "   pen/greedy")
    for name, best in timing:
        print(f"{name:<11}" + "".join(f"{best[p] * 1e3:>11.3f}" for p in POLICIES) + f"{best['penalized'] / best['greedy']:>13.3f}")


if __name__ == "__main__":
    main()
