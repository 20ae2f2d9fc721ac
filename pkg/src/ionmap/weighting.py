"""Edge-weight policies for the qubit interaction graph.

The baseline counts gates per qubit pair. The decaying policies give the first
occurrence of a pair the constant ``G`` (the number of two-qubit gates) and
every later occurrence ``f(cnt)``, where ``cnt`` is the position of the gate
among all two-qubit gates of the program.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .circuit import Circuit, CircuitStats, Pair, circuit_stats

__all__ = [
    "POLICY_KINDS",
    "PolicyParams",
    "WeightPolicy",
    "InteractionGraph",
    "greedy_weights",
    "decay_weights",
    "compute_weights",
    "step_f",
    "linear_f",
    "exp_f",
    "penalized_f",
]

POLICY_KINDS = ("greedy", "step", "linear", "exp", "penalized")
_ALIASES = {"exponential": "exp"}


@dataclass(frozen=True)
class PolicyParams:
    n_blocks: int = 10
    a_linear: float = 0.1
    a_exp: float = 2.0

    def __post_init__(self):
        if self.n_blocks < 1:
            raise ValueError(f"n_blocks must be >= 1, got {self.n_blocks}")
        if self.a_linear < 0:
            raise ValueError(f"a_linear must be >= 0, got {self.a_linear}")
        if self.a_exp <= 1:
            raise ValueError(f"a_exp must be > 1, got {self.a_exp}")


@dataclass(frozen=True)
class WeightPolicy:
    kind: str = "greedy"
    params: PolicyParams = field(default_factory=PolicyParams)

    def __post_init__(self):
        kind = _ALIASES.get(self.kind, self.kind)
        if kind not in POLICY_KINDS:
            raise ValueError(f"unknown policy {self.kind!r}; expected one of {POLICY_KINDS}")
        object.__setattr__(self, "kind", kind)

    def describe(self) -> dict:
        """Policy name plus only the parameters it reads."""
        used = {"step": ("n_blocks",), "linear": ("a_linear",), "exp": ("a_exp",)}
        p = asdict(self.params)
        return {"policy": self.kind, **{k: p[k] for k in used.get(self.kind, ())}}


@dataclass(frozen=True)
class InteractionGraph:
    num_qubits: int
    edges: dict[Pair, float]

    def weight(self, a: int, b: int) -> float:
        return self.edges[(a, b) if a < b else (b, a)]

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_qubits)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        return adj


# ---------------------------------------------------------------- decay functions

def step_f(cnt: int, G: int, n_blocks: int) -> int:
    """Staircase n, n-1, ..., 1 over n equal blocks of the gate sequence."""
    return n_blocks - (cnt * n_blocks) // G


def linear_f(cnt: int, G: int, a: float) -> float:
    return G - a * cnt


def exp_f(cnt: int, G: int, a: float) -> float:
    return G * a ** (-cnt / G)


def penalized_f(cnt: int, stats: CircuitStats) -> float:
    """Linear decay whose slope ``S*Q*D/G`` drives late re-occurrences negative."""
    G = stats.G
    return G - (stats.S * stats.Q * stats.D / G) * cnt


# ---------------------------------------------------------------- weight assignment

def _edge_dict(c: Circuit, keys: np.ndarray, values: np.ndarray) -> dict[Pair, float]:
    q = max(c.num_qubits, 1)
    return {(int(k) // q, int(k) % q): v for k, v in zip(keys.tolist(), values.tolist())}


def greedy_weights(c: Circuit) -> InteractionGraph:
    keys, counts = np.unique(c.pair_keys, return_counts=True)
    return InteractionGraph(c.num_qubits, _edge_dict(c, keys, counts))


def _decay_function(c: Circuit, policy: WeightPolicy, stats: CircuitStats | None) -> Callable:
    G = c.num_interactions
    p = policy.params
    if policy.kind == "step":
        return lambda cnt: step_f(cnt, G, p.n_blocks)
    if policy.kind == "linear":
        return lambda cnt: linear_f(cnt, G, p.a_linear)
    if policy.kind == "exp":
        return lambda cnt: exp_f(cnt, G, p.a_exp)
    if policy.kind == "penalized":
        st = stats if stats is not None else circuit_stats(c)
        return lambda cnt: penalized_f(cnt, st)
    raise ValueError(f"policy {policy.kind!r} has no decay function")


def decay_weights(c: Circuit, policy: WeightPolicy, stats: CircuitStats | None = None) -> InteractionGraph:
    """Position-aware weights; ``stats`` may be passed to avoid recomputing them.

    Contributions are summed per edge in program order, so the result equals a
    sequential accumulation exactly.
    """
    G = c.num_interactions
    if G == 0:
        return InteractionGraph(c.num_qubits, {})
    f = _decay_function(c, policy, stats)
    keys, first, inverse = np.unique(c.pair_keys, return_index=True, return_inverse=True)
    contrib = np.asarray(f(np.arange(G)), dtype=float)
    contrib[first] = G
    weights = np.bincount(inverse.ravel(), weights=contrib, minlength=len(keys))
    return InteractionGraph(c.num_qubits, _edge_dict(c, keys, weights))


def compute_weights(c: Circuit, policy: WeightPolicy, stats: CircuitStats | None = None) -> InteractionGraph:
    if policy.kind == "greedy":
        return greedy_weights(c)
    return decay_weights(c, policy, stats)
