"""Circuit representation, parsing, dependency layering and summary statistics."""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np

__all__ = [
    "CircuitError",
    "Gate",
    "Circuit",
    "DependencyDag",
    "CircuitStats",
    "parse_circuit",
    "serialize_circuit",
    "build_dag",
    "classify_symmetry",
    "circuit_stats",
    "edge_counts",
]

Pair = tuple[int, int]


class CircuitError(ValueError):
    """Malformed program text or an inconsistent circuit."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Gate:
    kind: str
    operands: tuple[int, ...]
    seq_index: int

    @property
    def is_interaction(self) -> bool:
        return len(self.operands) == 2

    @property
    def pair(self) -> Pair:
        """Unordered qubit pair as ``(low, high)``; only valid for 2-qubit gates."""
        a, b = self.operands
        return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class Circuit:
    num_qubits: int
    gates: tuple[Gate, ...]
    name: str = ""

    def __post_init__(self):
        if self.num_qubits < 0:
            raise CircuitError(f"negative qubit count {self.num_qubits}")
        for i, g in enumerate(self.gates):
            if g.seq_index != i:
                raise CircuitError(f"gate {i} has seq_index {g.seq_index}")
            if len(g.operands) not in (1, 2):
                raise CircuitError(f"gate {i} has {len(g.operands)} operands")
            if len(set(g.operands)) != len(g.operands):
                raise CircuitError(f"gate {i} repeats operand {g.operands[0]}")
            for q in g.operands:
                if not 0 <= q < self.num_qubits:
                    raise CircuitError(f"gate {i} operand {q} outside [0, {self.num_qubits})")

    @classmethod
    def from_pairs(cls, num_qubits: int, pairs: Iterable[Pair], name: str = "", kind: str = "MS"):
        gates = tuple(Gate(kind, (int(a), int(b)), i) for i, (a, b) in enumerate(pairs))
        return cls(num_qubits, gates, name)

    @cached_property
    def interactions(self) -> tuple[Gate, ...]:
        return tuple(g for g in self.gates if g.is_interaction)

    @cached_property
    def pairs(self) -> list[Pair]:
        return [g.pair for g in self.interactions]

    @cached_property
    def pair_keys(self) -> np.ndarray:
        """``low * num_qubits + high`` for every 2-qubit gate, in program order."""
        q = max(self.num_qubits, 1)
        return np.array([a * q + b for a, b in self.pairs], dtype=np.int64)

    @property
    def num_interactions(self) -> int:
        return len(self.interactions)


@dataclass(frozen=True)
class DependencyDag:
    layers: tuple[frozenset[int], ...]
    layer_of: tuple[int, ...] = field(repr=False)

    @property
    def depth(self) -> int:
        return len(self.layers)


@dataclass(frozen=True)
class CircuitStats:
    G: int
    Q: int
    D: int
    S: int

    def as_dict(self) -> dict[str, int]:
        return {"G": self.G, "Q": self.Q, "D": self.D, "S": self.S}


# ---------------------------------------------------------------- parsing

_MS_HEADER = re.compile(r"^qubits\s+(\d+)$", re.IGNORECASE)
_MS_GATE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s+(q\s*\[\s*\d+\s*\](?:\s*,\s*q\s*\[\s*\d+\s*\])*)$")
_QREF = re.compile(r"q\s*\[\s*(\d+)\s*\]")


def _check_operands(ops: list[int], size: int, line: int) -> None:
    if len(ops) > 2:
        raise CircuitError(f"{len(ops)}-qubit gates are not supported", line)
    if len(ops) == 2 and ops[0] == ops[1]:
        raise CircuitError(f"duplicate operand q[{ops[0]}]", line)
    for q in ops:
        if q >= size:
            raise CircuitError(f"qubit index {q} exceeds register size {size}", line)


def _parse_ms_text(text: str, name: str) -> Circuit:
    num_qubits = None
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if num_qubits is None:
            m = _MS_HEADER.match(line)
            if m is None:
                raise CircuitError("expected header 'qubits <Q>'", lineno)
            num_qubits = int(m.group(1))
            continue
        m = _MS_GATE.match(line)
        if m is None:
            raise CircuitError(f"cannot parse {line!r}", lineno)
        ops = [int(x) for x in _QREF.findall(m.group(2))]
        _check_operands(ops, num_qubits, lineno)
        gates.append(Gate(m.group(1), tuple(ops), len(gates)))
    if num_qubits is None:
        raise CircuitError("missing header 'qubits <Q>'")
    return Circuit(num_qubits, tuple(gates), name)


_QASM_IGNORED = {"OPENQASM", "include", "creg", "barrier", "measure", "reset"}
_QASM_STMT = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(\([^)]*\))?\s*(.*)$", re.DOTALL)
_QASM_ARG = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\[\s*(\d+)\s*\])?$")


def _parse_qasm(text: str, name: str) -> Circuit:
    # Statements are ';'-terminated; remember the line each one starts on.
    stripped = "\n".join(line.split("//", 1)[0] for line in text.splitlines())
    registers: dict[str, tuple[int, int]] = {}
    total = 0
    gates: list[Gate] = []
    depth = 0  # inside a 'gate ... { }' body
    for tok in re.finditer(r"[^;{}]*[;{}]|[^;{}]+$", stripped):
        chunk = tok.group(0)
        term = chunk[-1] if chunk[-1] in ";{}" else ""
        stmt = chunk.rstrip(";{}").strip()
        lead = len(chunk) - len(chunk.lstrip())
        lineno = stripped.count("\n", 0, tok.start() + lead) + 1
        if term == "{":
            depth += 1
            continue
        if term == "}":
            depth -= 1
            continue
        if not stmt or depth > 0:
            continue
        if not term:
            raise CircuitError(f"missing ';' after {stmt!r}", lineno)
        m = _QASM_STMT.match(stmt)
        if m is None:
            raise CircuitError(f"cannot parse {stmt!r}", lineno)
        head, _, rest = m.groups()
        if head in _QASM_IGNORED or head in {"gate", "opaque"}:
            continue
        if head == "qreg":
            am = _QASM_ARG.match(rest.strip())
            if am is None or am.group(2) is None:
                raise CircuitError(f"bad qreg declaration {stmt!r}", lineno)
            registers[am.group(1)] = (total, int(am.group(2)))
            total += int(am.group(2))
            continue
        args = [a.strip() for a in rest.split(",")] if rest.strip() else []
        if not args:
            raise CircuitError(f"gate {head!r} without operands", lineno)
        resolved: list[list[int]] = []
        for arg in args:
            am = _QASM_ARG.match(arg)
            if am is None or am.group(1) not in registers:
                raise CircuitError(f"unknown operand {arg!r}", lineno)
            offset, size = registers[am.group(1)]
            if am.group(2) is None:
                resolved.append([offset + i for i in range(size)])
            else:
                idx = int(am.group(2))
                if idx >= size:
                    raise CircuitError(f"qubit index {idx} exceeds register size {size}", lineno)
                resolved.append([offset + idx])
        if len(resolved) == 1:
            for q in resolved[0]:
                gates.append(Gate(head, (q,), len(gates)))
            continue
        if any(len(r) != 1 for r in resolved):
            raise CircuitError("register broadcast is only supported for 1-qubit gates", lineno)
        ops = [r[0] for r in resolved]
        _check_operands(ops, total, lineno)
        gates.append(Gate(head, tuple(ops), len(gates)))
    return Circuit(total, tuple(gates), name)


def parse_circuit(text: str, format: str = "ms-text", name: str = "") -> Circuit:
    """Parse program text in ``ms-text`` or ``qasm2-subset`` format."""
    if format == "ms-text":
        return _parse_ms_text(text, name)
    if format in ("qasm2-subset", "qasm"):
        return _parse_qasm(text, name)
    raise ValueError(f"unknown circuit format {format!r}")


def serialize_circuit(c: Circuit) -> str:
    lines = [f"qubits {c.num_qubits}"]
    lines += [f"{g.kind} " + ", ".join(f"q[{q}]" for q in g.operands) for g in c.gates]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- analysis

def build_dag(c: Circuit) -> DependencyDag:
    """ASAP layering: a gate sits one layer after the latest earlier gate on any of its qubits."""
    last = [-1] * c.num_qubits
    layer_of = []
    layers: list[set[int]] = []
    for g in c.gates:
        lvl = 1 + max(last[q] for q in g.operands)
        for q in g.operands:
            last[q] = lvl
        if lvl == len(layers):
            layers.append(set())
        layers[lvl].add(g.seq_index)
        layer_of.append(lvl)
    return DependencyDag(tuple(frozenset(s) for s in layers), tuple(layer_of))


def edge_counts(c: Circuit) -> Counter:
    return Counter(c.pairs)


def classify_symmetry(c: Circuit) -> int:
    """0 when every interacting pair occurs equally often, else 1."""
    counts = set(edge_counts(c).values())
    return 0 if len(counts) <= 1 else 1


def circuit_stats(c: Circuit) -> CircuitStats:
    return CircuitStats(
        G=c.num_interactions,
        Q=c.num_qubits,
        D=build_dag(c).depth,
        S=classify_symmetry(c),
    )
