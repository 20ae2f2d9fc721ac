"""Seeded workload generators: random interaction circuits and structural stand-ins
for QFT, QAOA, supremacy-style and square-root arithmetic benchmarks.

Every generator is a pure function of its arguments. Randomness comes from
``numpy.random.PCG64`` seeded with an integer, which gives identical streams
on every platform.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np

from .circuit import Circuit, Pair, serialize_circuit

__all__ = [
    "PATTERNS",
    "RandomSpec",
    "SuiteEntry",
    "SuiteManifest",
    "gen_random",
    "gen_qft",
    "gen_qaoa",
    "gen_supremacy_like",
    "gen_sqrt_like",
    "random_suite",
    "named_suite",
    "build_suite",
    "write_suite",
    "load_suite",
    "PRNG",
]

PRNG = "numpy.random.PCG64"
PATTERNS = ("uniform", "clustered", "sliding", "powerlaw")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(int(seed)))


@dataclass(frozen=True)
class RandomSpec:
    seed: int = 0
    qubit_range: tuple[int, int] = (60, 75)
    gate_range: tuple[int, int] = (900, 2000)
    pattern_mix: dict[str, float] = field(
        default_factory=lambda: {"uniform": 1.0, "clustered": 1.0, "sliding": 1.0, "powerlaw": 1.0}
    )
    n_groups: int = 4
    intra_bias: float = 0.85
    window: int = 8
    zipf_exponent: float = 1.0

    def __post_init__(self):
        (q0, q1), (g0, g1) = self.qubit_range, self.gate_range
        if q0 < 2 or q1 < q0:
            raise ValueError(f"empty or too small qubit range {self.qubit_range}")
        if g0 < 0 or g1 < g0:
            raise ValueError(f"empty gate range {self.gate_range}")
        unknown = set(self.pattern_mix) - set(PATTERNS)
        if unknown:
            raise ValueError(f"unknown patterns {sorted(unknown)}")
        weights = list(self.pattern_mix.values())
        if any(w < 0 for w in weights) or sum(weights) <= 0:
            raise ValueError("pattern weights must be >= 0 with a positive sum")
        if not 0 <= self.intra_bias <= 1:
            raise ValueError("intra_bias must lie in [0, 1]")

    def to_json(self) -> dict:
        d = asdict(self)
        d["qubit_range"] = list(self.qubit_range)
        d["gate_range"] = list(self.gate_range)
        return d

    @classmethod
    def from_json(cls, d: dict) -> "RandomSpec":
        d = dict(d)
        d["qubit_range"] = tuple(d["qubit_range"])
        d["gate_range"] = tuple(d["gate_range"])
        return cls(**d)


def _distinct_pair(rng: np.random.Generator, pool: np.ndarray, p: np.ndarray | None = None) -> Pair:
    a, b = rng.choice(pool, size=2, replace=False, p=p)
    return int(a), int(b)


def gen_random(spec: RandomSpec, name: str = "") -> Circuit:
    """Random 2-qubit interaction program drawn from a mixture of communication patterns.

    * ``uniform``: any pair, uniformly.
    * ``clustered``: qubits split into ``n_groups`` groups; with probability
      ``intra_bias`` both operands come from one group.
    * ``sliding``: operands drawn from a ``window`` of qubits whose centre
      drifts across the register over the course of the program.
    * ``powerlaw``: operands drawn with Zipf-distributed popularity.
    """
    rng = _rng(spec.seed)
    Q = int(rng.integers(spec.qubit_range[0], spec.qubit_range[1] + 1))
    G = int(rng.integers(spec.gate_range[0], spec.gate_range[1] + 1))
    # Random relabelling keeps structure independent of qubit index order.
    order = rng.permutation(Q)
    groups = np.array_split(order, min(spec.n_groups, Q // 2))
    ranks = np.arange(1, Q + 1, dtype=float) ** -spec.zipf_exponent
    popularity = ranks / ranks.sum()
    width = max(2, min(spec.window, Q))

    names = [k for k in PATTERNS if spec.pattern_mix.get(k, 0) > 0]
    mix = np.array([spec.pattern_mix[k] for k in names], dtype=float)
    choice = rng.choice(len(names), size=G, p=mix / mix.sum())

    pairs: list[Pair] = []
    for cnt in range(G):
        kind = names[choice[cnt]]
        if kind == "uniform":
            pairs.append(_distinct_pair(rng, order))
        elif kind == "clustered":
            if rng.random() < spec.intra_bias:
                grp = groups[int(rng.integers(len(groups)))]
                pairs.append(_distinct_pair(rng, grp))
            else:
                pairs.append(_distinct_pair(rng, order))
        elif kind == "sliding":
            centre = int(round(cnt * (Q - 1) / max(G - 1, 1)))
            start = min(max(centre - width // 2, 0), Q - width)
            pairs.append(_distinct_pair(rng, order[start : start + width]))
        else:
            pairs.append(_distinct_pair(rng, order, popularity))
    return Circuit.from_pairs(Q, pairs, name=name)


def gen_qft(Q: int, gates_per_pair: int = 2, name: str = "") -> Circuit:
    """All-pairs controlled-phase ladder, ``gates_per_pair`` interactions per pair."""
    if Q < 2 or gates_per_pair < 1:
        raise ValueError(f"invalid QFT size Q={Q}, gates_per_pair={gates_per_pair}")
    pairs = [(i, j) for i in range(Q) for j in range(i + 1, Q) for _ in range(gates_per_pair)]
    return Circuit.from_pairs(Q, pairs, name=name or f"qft{Q}")


def gen_qaoa(Q: int, layers: int, edge_density: float, seed: int, name: str = "") -> Circuit:
    """``layers`` repetitions of one random graph's edge list (ZZ cost layer)."""
    if Q < 2 or layers < 1 or not 0 < edge_density <= 1:
        raise ValueError(f"invalid QAOA size Q={Q}, layers={layers}, density={edge_density}")
    rng = _rng(seed)
    all_pairs = [(i, j) for i in range(Q) for j in range(i + 1, Q)]
    m = max(1, int(round(edge_density * len(all_pairs))))
    picked = sorted(rng.choice(len(all_pairs), size=m, replace=False).tolist())
    edges = [all_pairs[k] for k in picked]
    return Circuit.from_pairs(Q, edges * layers, name=name or f"qaoa{Q}")


def _grid_couplers(Q: int) -> list[list[Pair]]:
    rows = max(1, math.isqrt(Q))
    cols = math.ceil(Q / rows)

    def idx(r, c):
        return r * cols + c

    patterns: list[list[Pair]] = [[], [], [], []]
    for r in range(rows):
        for c in range(cols - 1):
            a, b = idx(r, c), idx(r, c + 1)
            if b < Q:
                patterns[c % 2].append((a, b))
    for r in range(rows - 1):
        for c in range(cols):
            a, b = idx(r, c), idx(r + 1, c)
            if b < Q:
                patterns[2 + r % 2].append((a, b))
    return [p for p in patterns if p]


def gen_supremacy_like(
    Q: int,
    depth: int,
    seed: int,
    activation: float = 0.8,
    max_gates: int | None = None,
    name: str = "",
) -> Circuit:
    """Grid circuit cycling coupler patterns in the order A B C D C D A B.

    Each coupler of the active pattern fires with probability ``activation``;
    the program is cut after ``max_gates`` interactions if given.
    """
    if Q < 2 or depth < 1:
        raise ValueError(f"invalid supremacy-like size Q={Q}, depth={depth}")
    rng = _rng(seed)
    patterns = _grid_couplers(Q)
    sequence = [0, 1, 2, 3, 2, 3, 0, 1]
    pairs: list[Pair] = []
    for cycle in range(depth):
        pat = patterns[sequence[cycle % len(sequence)] % len(patterns)]
        fire = rng.random(len(pat)) < activation
        pairs.extend(p for p, on in zip(pat, fire) if on)
        if max_gates is not None and len(pairs) >= max_gates:
            break
    if max_gates is not None:
        pairs = pairs[:max_gates]
    return Circuit.from_pairs(Q, pairs, name=name or f"supremacy{Q}")


def gen_sqrt_like(Q: int, G: int, seed: int, name: str = "") -> Circuit:
    """Arithmetic-style program: repeated controlled ripple-carry adds of random width.

    Qubits are split into an input register, a work register and one flag. Each
    round adds a prefix of the input into the work register (carry chain up,
    uncompute down) and then compares the top work bit against the flag.
    """
    if Q < 4 or G < 1:
        raise ValueError(f"invalid sqrt-like size Q={Q}, G={G}")
    rng = _rng(seed)
    n_in = (Q - 1) // 2
    data = list(range(n_in))
    work = list(range(n_in, Q - 1))
    flag = Q - 1
    pairs: list[Pair] = []
    while len(pairs) < G:
        width = int(rng.integers(2, min(len(data), len(work)) + 1))
        shift = int(rng.integers(0, len(work) - width + 1))
        w = work[shift : shift + width]
        for i in range(width):
            pairs.append((data[i], w[i]))
            if i + 1 < width:
                pairs.append((w[i], w[i + 1]))
        pairs.append((w[-1], flag))
        for i in reversed(range(width - 1)):
            pairs.append((w[i], w[i + 1]))
    return Circuit.from_pairs(Q, pairs[:G], name=name or f"sqrt{Q}")


# ---------------------------------------------------------------- suites

_GENERATORS: dict[str, Callable[..., Circuit]] = {
    "random": lambda seed, **kw: gen_random(RandomSpec.from_json({**kw, "seed": seed})),
    "qft": lambda seed, **kw: gen_qft(**kw),
    "qaoa": lambda seed, **kw: gen_qaoa(seed=seed, **kw),
    "supremacy": lambda seed, **kw: gen_supremacy_like(seed=seed, **kw),
    "sqrt": lambda seed, **kw: gen_sqrt_like(seed=seed, **kw),
}


@dataclass(frozen=True)
class SuiteEntry:
    name: str
    generator: str
    params: dict[str, Any]
    seed: int

    def build(self) -> Circuit:
        c = _GENERATORS[self.generator](self.seed, **self.params)
        return Circuit(c.num_qubits, c.gates, self.name)


@dataclass(frozen=True)
class SuiteManifest:
    suite: str
    seed: int
    circuits: tuple[SuiteEntry, ...]
    prng: str = PRNG
    stand_in: bool = True

    def __post_init__(self):
        names = [e.name for e in self.circuits]
        if len(set(names)) != len(names):
            raise ValueError("suite circuit names must be unique")

    def to_json(self) -> str:
        d = {
            "suite": self.suite,
            "seed": self.seed,
            "prng": self.prng,
            "stand_in": self.stand_in,
            "circuits": [asdict(e) for e in self.circuits],
        }
        return json.dumps(d, indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "SuiteManifest":
        d = json.loads(text)
        entries = tuple(SuiteEntry(**e) for e in d["circuits"])
        return cls(d["suite"], d["seed"], entries, d.get("prng", PRNG), d.get("stand_in", True))

    def build(self) -> list[Circuit]:
        return [e.build() for e in self.circuits]


def _child_seed(seed: int, i: int) -> int:
    return int(np.random.SeedSequence([seed, i]).generate_state(1, np.uint64)[0] >> 1)


def random_suite(seed: int = 2022, count: int = 120, base: RandomSpec = RandomSpec()) -> SuiteManifest:
    """``count`` random circuits, each with its own Dirichlet-drawn pattern mix."""
    rng = _rng(seed)
    entries = []
    for i in range(count):
        mix = rng.dirichlet(np.ones(len(PATTERNS)))
        params = base.to_json()
        params.pop("seed")
        params["pattern_mix"] = {k: round(float(w), 6) for k, w in zip(PATTERNS, mix)}
        entries.append(SuiteEntry(f"rand{i:03d}", "random", params, _child_seed(seed, i)))
    return SuiteManifest("random120" if count == 120 else f"random{count}", seed, tuple(entries))


def named_suite(seed: int = 2022) -> SuiteManifest:
    """Stand-ins matching the (qubits, gates) rows of the named benchmarks."""
    entries = (
        SuiteEntry("SquareRoot", "sqrt", {"Q": 78, "G": 1028}, _child_seed(seed, 0)),
        SuiteEntry("Supremacy", "supremacy", {"Q": 64, "depth": 40, "max_gates": 560}, _child_seed(seed, 1)),
        SuiteEntry("QAOA", "qaoa", {"Q": 64, "layers": 10, "edge_density": 0.0625}, _child_seed(seed, 2)),
        SuiteEntry("QFT", "qft", {"Q": 64, "gates_per_pair": 2}, _child_seed(seed, 3)),
    )
    return SuiteManifest("named", seed, entries)


SUITES = {"random120": random_suite, "named": named_suite}


def build_suite(name: str, seed: int) -> SuiteManifest:
    if name in SUITES:
        return SUITES[name](seed)
    if name.startswith("random") and name[6:].isdigit():
        return random_suite(seed, int(name[6:]))
    raise ValueError(f"unknown suite {name!r}; known: {sorted(SUITES)} or random<N>")


def write_suite(manifest: SuiteManifest, out: str | Path) -> list[Path]:
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(manifest.to_json())
    paths = []
    for c in manifest.build():
        p = out / f"{c.name}.ms"
        p.write_text(serialize_circuit(c))
        paths.append(p)
    return paths


def load_suite(path: str | Path) -> list[Circuit]:
    """Circuits of a suite directory, regenerated from its manifest if present."""
    from .circuit import parse_circuit

    path = Path(path)
    files = sorted(path.glob("*.ms"))
    if files:
        return [parse_circuit(p.read_text(), "ms-text", name=p.stem) for p in files]
    manifest = path / "manifest.json"
    if manifest.exists():
        return SuiteManifest.from_json(manifest.read_text()).build()
    raise FileNotFoundError(f"no circuits or manifest.json in {path}")
