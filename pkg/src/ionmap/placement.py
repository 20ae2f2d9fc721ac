"""Initial placement of logical qubits onto a linear array of ion traps."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .weighting import InteractionGraph

__all__ = ["PlacementError", "TrapTopology", "Mapping", "place", "distance", "edge_order"]


class PlacementError(ValueError):
    pass


@dataclass(frozen=True)
class TrapTopology:
    """Traps ``0..num_traps-1`` connected in a line; trap ``t`` neighbours ``t-1`` and ``t+1``."""

    num_traps: int = 6
    trap_capacity: int = 17
    initial_load: int = 15

    def __post_init__(self):
        if self.num_traps < 1:
            raise PlacementError("need at least one trap")
        if not 0 < self.initial_load < self.trap_capacity:
            raise PlacementError(
                f"initial_load={self.initial_load} must leave communication capacity "
                f"in a trap of capacity {self.trap_capacity}"
            )

    @property
    def communication_capacity(self) -> int:
        return self.trap_capacity - self.initial_load

    @property
    def load_slots(self) -> int:
        return self.num_traps * self.initial_load

    def hops(self, t1: int, t2: int) -> int:
        return abs(t1 - t2)


@dataclass(frozen=True)
class Mapping:
    """Per-trap ion chains, left to right."""

    chains: tuple[tuple[int, ...], ...]

    @cached_property
    def slot_of(self) -> dict[int, tuple[int, int]]:
        return {q: (t, i) for t, chain in enumerate(self.chains) for i, q in enumerate(chain)}

    @property
    def num_qubits(self) -> int:
        return sum(len(c) for c in self.chains)

    def trap_of(self, q: int) -> int:
        return self.slot_of[q][0]

    def validate(self, topo: TrapTopology, num_qubits: int | None = None) -> None:
        if len(self.chains) != topo.num_traps:
            raise PlacementError(f"{len(self.chains)} chains for {topo.num_traps} traps")
        for t, chain in enumerate(self.chains):
            if len(chain) > topo.trap_capacity:
                raise PlacementError(f"trap {t} holds {len(chain)} > {topo.trap_capacity} ions")
        if len(self.slot_of) != self.num_qubits:
            raise PlacementError("a qubit occupies more than one slot")
        if num_qubits is not None and sorted(self.slot_of) != list(range(num_qubits)):
            raise PlacementError(f"mapping does not cover qubits 0..{num_qubits - 1}")

    def as_dict(self) -> dict[str, list[int]]:
        return {f"T{t}": list(c) for t, c in enumerate(self.chains)}


def distance(m: Mapping, q1: int, q2: int, topo: TrapTopology) -> int:
    """Trap hops scaled by capacity, or the in-chain offset for co-trapped qubits."""
    try:
        t1, p1 = m.slot_of[q1]
        t2, p2 = m.slot_of[q2]
    except KeyError as exc:
        raise PlacementError(f"qubit {exc.args[0]} is not mapped") from None
    if t1 != t2:
        return abs(t1 - t2) * topo.trap_capacity
    return abs(p1 - p2)


def edge_order(g: InteractionGraph) -> list[tuple[int, int]]:
    """Descending signed weight; equal weights by (low qubit, high qubit)."""
    return sorted(g.edges, key=lambda e: (-g.edges[e], e))


class _Slots:
    """Load slots of every trap during placement; communication slots stay empty."""

    def __init__(self, topo: TrapTopology, num_qubits: int):
        self.topo = topo
        self.grid: list[list[int | None]] = [[None] * topo.initial_load for _ in range(topo.num_traps)]
        self.where: list[tuple[int, int] | None] = [None] * num_qubits
        self.free = [topo.initial_load] * topo.num_traps

    def put(self, q: int, t: int, p: int) -> None:
        assert self.grid[t][p] is None
        self.grid[t][p] = q
        self.where[q] = (t, p)
        self.free[t] -= 1

    def roomiest_trap(self) -> int:
        best = max(self.free)
        return self.free.index(best)

    def best_slot(self, neighbors: list[int]) -> tuple[int, int]:
        topo = self.topo
        mapped = [self.where[v] for v in neighbors if self.where[v] is not None]
        best = None
        for t in range(topo.num_traps):
            if not self.free[t]:
                continue
            inter = sum(abs(t - tv) for tv, _ in mapped if tv != t) * topo.trap_capacity
            local = [pv for tv, pv in mapped if tv == t]
            for p, occupant in enumerate(self.grid[t]):
                if occupant is not None:
                    continue
                cost = inter + sum(abs(p - pv) for pv in local)
                if best is None or cost < best[0]:
                    best = (cost, t, p)
        assert best is not None
        return best[1], best[2]

    def to_mapping(self) -> Mapping:
        return Mapping(tuple(tuple(q for q in row if q is not None) for row in self.grid))


def _seed(slots: _Slots, adj: list[list[int]], strength: list[float], a: int, b: int) -> None:
    # The endpoint with less incident weight takes the outer slot (lower index on ties).
    if (strength[b], b) < (strength[a], a):
        a, b = b, a
    t = slots.roomiest_trap()
    slots.put(a, t, slots.grid[t].index(None))
    slots.put(b, *slots.best_slot(adj[b]))


def _attach(slots: _Slots, adj: list[list[int]], a: int, b: int) -> bool:
    """Place the unmapped endpoint of a half-mapped edge; False if neither end is mapped."""
    ma = slots.where[a] is not None
    mb = slots.where[b] is not None
    if ma and mb:
        return True
    if not ma and not mb:
        return False
    q = b if ma else a
    slots.put(q, *slots.best_slot(adj[q]))
    return True


def place(g: InteractionGraph, topo: TrapTopology) -> Mapping:
    """Greedy initial placement driven by the interaction-graph edge order.

    Edges are visited heaviest first. The first edge seeds the trap with the
    most free load slots. For a later edge with exactly one placed endpoint,
    the other endpoint takes the free load slot with the smallest total
    ``distance`` to its placed neighbours (lowest trap, then lowest position,
    on ties). Edges with no placed endpoint are revisited in a second pass,
    in the same order, seeding a new group when still unplaced. Qubits
    without edges fill what is left, left to right.
    """
    Q = g.num_qubits
    if Q > topo.load_slots:
        raise PlacementError(f"{Q} qubits exceed {topo.load_slots} load slots of the topology")
    slots = _Slots(topo, Q)
    adj = g.neighbors()
    strength = [0.0] * Q
    for (a, b), w in g.edges.items():
        strength[a] += w
        strength[b] += w
    order = edge_order(g)
    deferred = []
    for i, (a, b) in enumerate(order):
        if i == 0:
            _seed(slots, adj, strength, a, b)
        elif not _attach(slots, adj, a, b):
            deferred.append((a, b))
    for a, b in deferred:
        if not _attach(slots, adj, a, b):
            _seed(slots, adj, strength, a, b)

    for q in range(Q):
        if slots.where[q] is None:
            t = next(t for t in range(topo.num_traps) if slots.free[t])
            slots.put(q, t, slots.grid[t].index(None))
    return slots.to_mapping()
