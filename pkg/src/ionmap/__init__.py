"""Position-aware initial qubit mapping for linear multi-trap trapped-ion machines."""

from .circuit import (
    Circuit,
    CircuitError,
    CircuitStats,
    DependencyDag,
    Gate,
    build_dag,
    circuit_stats,
    classify_symmetry,
    parse_circuit,
    serialize_circuit,
)
from .placement import Mapping, PlacementError, TrapTopology, distance, place
from .qccd import DeadlockError, FidelityModel, SimResult, program_fidelity, resolve_shuttle, simulate
from .weighting import (
    InteractionGraph,
    PolicyParams,
    WeightPolicy,
    compute_weights,
    decay_weights,
    exp_f,
    greedy_weights,
    linear_f,
    penalized_f,
    step_f,
)

__version__ = "0.1.0"
