from importlib import resources

import pytest
from hypothesis import settings
from hypothesis import strategies as st

from ionmap import Circuit, TrapTopology, parse_circuit

settings.register_profile("ci", max_examples=60, deadline=None)
settings.load_profile("ci")


def sample_text() -> str:
    return resources.files("ionmap").joinpath("data/sample6.ms").read_text()


@pytest.fixture
def sample6() -> Circuit:
    return parse_circuit(sample_text(), name="sample6")


@pytest.fixture
def two_traps() -> TrapTopology:
    # Sample machine: two traps of capacity 4, three ions loaded in each.
    return TrapTopology(num_traps=2, trap_capacity=4, initial_load=3)


@st.composite
def circuits(draw, min_qubits=2, max_qubits=10, max_gates=40, one_qubit=False):
    q = draw(st.integers(min_qubits, max_qubits))
    n = draw(st.integers(0, max_gates))
    ops = []
    for _ in range(n):
        if one_qubit and draw(st.booleans()):
            ops.append(("h", (draw(st.integers(0, q - 1)),)))
        else:
            a = draw(st.integers(0, q - 1))
            b = draw(st.integers(0, q - 2))
            ops.append(("MS", (a, b if b < a else b + 1)))
    from ionmap.circuit import Gate

    return Circuit(q, tuple(Gate(k, o, i) for i, (k, o) in enumerate(ops)), "h")


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
