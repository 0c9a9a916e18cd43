"""Shared helpers: ket construction and phase-insensitive comparison."""

import numpy as np
import pytest

from spinweave import statevec as sv

# Filled by the acceptance tests; echoed after the run so the checklist
# survives output capture.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance checklist")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def ket(label: str) -> sv.PureState:
    """Build a product ket from a written label, leftmost = highest qubit.

    Plain bit strings work directly: ket("10") == basis_state("10").
    Mixed labels are space-separated: ket("+ 0 -i").
    """
    label = label.strip()
    if " " in label:
        tokens = label.split()
    else:
        tokens = list(label)
    return sv.tensor(*(sv.qubit_state(t) for t in tokens))


def assert_close_up_to_phase(a: sv.PureState, b: sv.PureState, tol: float = 1e-10):
    overlap = abs(complex(np.vdot(a.amplitudes, b.amplitudes)))
    assert a.num_qubits == b.num_qubits
    assert abs(1.0 - overlap) <= tol, f"overlap magnitude {overlap}"


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)
