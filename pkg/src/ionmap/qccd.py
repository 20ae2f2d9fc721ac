"""Shuttle-counting execution model of a linear multi-trap (QCCD) machine.

Gates run one at a time in program order. A two-qubit gate whose ions sit in
different traps first moves one of them to the other's trap (split, move
across ``hops`` segments, merge). Every merge heats the receiving chain, and
each gate's fidelity is ``1 - gamma*tau - A*(2*nbar + 1)`` for the chain it
runs on.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Sequence

from .circuit import Circuit, Pair
from .placement import Mapping, TrapTopology

__all__ = [
    "DeadlockError",
    "FidelityModel",
    "ShuttleEvent",
    "GateRecord",
    "ShuttleTrace",
    "MachineState",
    "SimResult",
    "simulate",
    "resolve_shuttle",
    "program_fidelity",
    "gate_fidelity",
    "LOOKAHEAD",
]

LOOKAHEAD = 20


class DeadlockError(RuntimeError):
    """No trap can take the ion that has to move."""


@dataclass(frozen=True)
class FidelityModel:
    # Order-of-magnitude placeholders; only ratios between policies are meaningful.
    gamma: float = 0.001
    tau: float = 1.0
    A: float = 0.0043
    heat_per_shuttle: float = 0.1
    n0: float = 0.0
    shuttle_time: float = 5.0

    def __post_init__(self):
        for k, v in asdict(self).items():
            if v < 0:
                raise ValueError(f"fidelity parameter {k} must be >= 0, got {v}")


def gate_fidelity(nbar: float, fm: FidelityModel) -> float:
    f = 1.0 - fm.gamma * fm.tau - fm.A * (2.0 * nbar + 1.0)
    return min(1.0, max(0.0, f))


@dataclass(frozen=True)
class ShuttleEvent:
    gate: int
    ion: int
    source: int
    dest: int
    hops: int
    reason: str = "gate"  # or "evict"


@dataclass(frozen=True)
class GateRecord:
    gate: int
    trap: int
    nbar: float


@dataclass
class ShuttleTrace:
    events: list[ShuttleEvent] = field(default_factory=list)
    gates: list[GateRecord] = field(default_factory=list)

    @property
    def hop_count(self) -> int:
        return sum(e.hops for e in self.events)

    @property
    def move_count(self) -> int:
        return len(self.events)

    def to_jsonl(self) -> str:
        return "".join(json.dumps(asdict(e), sort_keys=True) + "\n" for e in self.events)

    @staticmethod
    def events_from_jsonl(text: str) -> list[ShuttleEvent]:
        return [ShuttleEvent(**json.loads(line)) for line in text.splitlines() if line.strip()]


class MachineState:
    """Mutable machine state for one simulation run."""

    def __init__(self, m0: Mapping, topo: TrapTopology, fm: FidelityModel, check: bool = True):
        m0.validate(topo)
        self.topo = topo
        self.fm = fm
        self.check = check
        self.chains: list[list[int]] = [list(c) for c in m0.chains]
        self.trap_of: dict[int, int] = {q: t for t, c in enumerate(self.chains) for q in c}
        self.chain_energy: list[float] = [fm.n0] * topo.num_traps
        self.shuttle_count = 0
        self.trace = ShuttleTrace()
        self._num_ions = len(self.trap_of)

    def has_room(self, t: int) -> bool:
        return len(self.chains[t]) < self.topo.trap_capacity

    def move(self, ion: int, dest: int, gate: int, reason: str = "gate") -> None:
        src = self.trap_of[ion]
        hops = self.topo.hops(src, dest)
        if not self.has_room(dest):
            raise DeadlockError(f"trap {dest} is full")
        self.chains[src].remove(ion)
        # The ion enters the destination chain at the end facing the source trap.
        if dest > src:
            self.chains[dest].insert(0, ion)
        else:
            self.chains[dest].append(ion)
        self.trap_of[ion] = dest
        self.chain_energy[dest] += self.fm.heat_per_shuttle * hops
        self.shuttle_count += hops
        self.trace.events.append(ShuttleEvent(gate, ion, src, dest, hops, reason))
        if self.check:
            self.check_invariants()

    def check_invariants(self) -> None:
        cap = self.topo.trap_capacity
        assert all(len(c) <= cap for c in self.chains), "trap over capacity"
        assert sum(len(c) for c in self.chains) == self._num_ions, "ion count changed"
        assert self.shuttle_count == self.trace.hop_count

    def mapping(self) -> Mapping:
        return Mapping(tuple(tuple(c) for c in self.chains))


def _affinity(state: MachineState, ion: int, home: int, away: int, window: Sequence[Pair]) -> int:
    """Upcoming gates pulling ``ion`` to stay in ``home`` minus those pulling it to ``away``."""
    score = 0
    for a, b in window:
        if a == ion:
            other = b
        elif b == ion:
            other = a
        else:
            continue
        t = state.trap_of[other]
        if t == home:
            score += 1
        elif t == away:
            score -= 1
    return score


def _usage(ion: int, window: Sequence[Pair]) -> int:
    return sum(1 for a, b in window if a == ion or b == ion)


def resolve_shuttle(
    state: MachineState,
    q1: int,
    q2: int,
    window: Sequence[Pair] = (),
    gate: int = -1,
) -> MachineState:
    """Bring ``q1`` and ``q2`` into one trap.

    The ion whose upcoming gates are least tied to its current trap moves
    (lower index on ties). If only one of the two traps has room, the ion
    moves into that one. If neither has room, the least-used ion of the
    destination is first evicted to the nearest trap with room.
    """
    t1, t2 = state.trap_of[q1], state.trap_of[q2]
    if t1 == t2:
        raise ValueError(f"qubits {q1} and {q2} already share trap {t1}")
    s1 = _affinity(state, q1, t1, t2, window)
    s2 = _affinity(state, q2, t2, t1, window)
    if (s1, q1) <= (s2, q2):
        mover, dest = q1, t2
    else:
        mover, dest = q2, t1

    if not state.has_room(dest):
        other = q2 if mover == q1 else q1
        if state.has_room(state.trap_of[mover]):
            mover, dest = other, state.trap_of[mover]
        else:
            _evict(state, dest, keep=(q1, q2), window=window, gate=gate)
    state.move(mover, dest, gate)
    return state


def _evict(state: MachineState, trap: int, keep: Iterable[int], window: Sequence[Pair], gate: int) -> None:
    keep = set(keep)
    candidates = [q for q in state.chains[trap] if q not in keep]
    if not candidates:
        raise DeadlockError(f"trap {trap} is full of gate operands")
    victim = min(candidates, key=lambda q: (_usage(q, window), q))
    targets = [t for t in range(state.topo.num_traps) if t != trap and state.has_room(t)]
    if not targets:
        raise DeadlockError(f"no trap has room for ion {victim} evicted from trap {trap}")
    target = min(targets, key=lambda t: (abs(t - trap), t))
    state.move(victim, target, gate, reason="evict")


@dataclass(frozen=True)
class SimResult:
    shuttle_count: int
    move_count: int
    program_fidelity: float
    log_fidelity: float
    wall_time: float
    trace: ShuttleTrace = field(repr=False, compare=False)
    final_mapping: Mapping = field(repr=False, compare=False)

    def summary(self) -> dict:
        return {
            "shuttle_count": self.shuttle_count,
            "move_count": self.move_count,
            "program_fidelity": self.program_fidelity,
            "log_fidelity": self.log_fidelity,
            "wall_time": self.wall_time,
        }


def program_fidelity(trace: ShuttleTrace, fm: FidelityModel) -> tuple[float, float]:
    """Product of per-gate fidelities, returned as ``(value, natural log)``.

    The log survives where the product underflows on long circuits.
    """
    log_f = 0.0
    for rec in trace.gates:
        f = gate_fidelity(rec.nbar, fm)
        if f == 0.0:
            return 0.0, -math.inf
        log_f += math.log(f)
    return math.exp(log_f), log_f


def simulate(
    c: Circuit,
    m0: Mapping,
    topo: TrapTopology,
    fm: FidelityModel = FidelityModel(),
    lookahead: int = LOOKAHEAD,
    check: bool = True,
) -> SimResult:
    m0.validate(topo)
    missing = [q for q in range(c.num_qubits) if q not in m0.slot_of]
    if missing:
        raise ValueError(f"initial mapping misses qubits {missing[:5]}")
    state = MachineState(m0, topo, fm, check=check)
    gates = c.interactions
    pairs = c.pairs
    for k, g in enumerate(gates):
        a, b = g.operands
        if state.trap_of[a] != state.trap_of[b]:
            resolve_shuttle(state, a, b, pairs[k + 1 : k + 1 + lookahead], gate=g.seq_index)
        t = state.trap_of[a]
        state.trace.gates.append(GateRecord(g.seq_index, t, state.chain_energy[t]))
    value, log_f = program_fidelity(state.trace, fm)
    wall = len(gates) * fm.tau + state.shuttle_count * fm.shuttle_time
    return SimResult(
        shuttle_count=state.shuttle_count,
        move_count=state.trace.move_count,
        program_fidelity=value,
        log_fidelity=log_f,
        wall_time=wall,
        trace=state.trace,
        final_mapping=state.mapping(),
    )
