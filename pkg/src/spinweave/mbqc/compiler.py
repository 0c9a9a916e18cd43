"""Compile gate circuits into entanglement blueprints plus patterns.

The primitive is the hop: bond the wire head to a fresh plus-state
vertex with a CZ and measure the head at angle ``t`` in the xy plane,
which drives the wire through ``H Uz(-t)`` (outcome 1 adds an X
byproduct).  Three consecutive hops cover every single-qubit unitary, so
each 1-wire gate becomes one three-hop block and every two-wire CZ
becomes a direct bridge edge between the current wire heads.

Byproducts are propagated symbolically: each wire carries X and Z index
sets over measurement numbers, updated as

* hop i:   adapt on the X set, then (X, Z) <- (Z xor {i}, X)
* bridge:  Z_a xor= X_b and Z_b xor= X_a

so the emitted pattern's feed-forward and final frame are pure outcome
functions.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from ..errors import SizeLimitError
from ..statevec import phase_gate
from .patterns import CircuitSpec, GraphBlueprint, MeasurementPattern, PatternEntry

MAX_WIRES = 4
MAX_VERTICES = 20

HADAMARD = np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / math.sqrt(2.0)


def hop_unitary(angle: float) -> np.ndarray:
    """The map one hop applies to its wire (outcome-0 branch)."""
    return HADAMARD @ phase_gate(-angle)


def _zxz(m: np.ndarray) -> tuple[float, float, float]:
    """(a, b, c) with Uz(a) . H Uz(b) H . Uz(c) = m up to global phase."""
    b = 2.0 * math.atan2(abs(m[1, 0]), abs(m[0, 0]))
    if abs(m[0, 0]) < 1e-12:
        a = cmath.phase(m[1, 0] / m[0, 1])
        c = 0.0
    elif abs(m[1, 0]) < 1e-12:
        a = cmath.phase(m[1, 1] / m[0, 0])
        c = 0.0
    else:
        a = cmath.phase(m[1, 0] / m[0, 0]) + math.pi / 2.0
        c = cmath.phase(m[0, 1] / m[0, 0]) + math.pi / 2.0
    return a, b, c


def hop_angles_for(u: np.ndarray) -> tuple[float, float, float]:
    """Angles (t1, t2, t3) whose three-hop net equals ``u`` up to phase."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not np.allclose(u.conj().T @ u, np.eye(2), atol=1e-10):
        raise ValueError("gate must be a 2x2 unitary")
    a, b, c = _zxz(HADAMARD @ u)
    angles = (-c, -b, -a)
    net = hop_unitary(angles[2]) @ hop_unitary(angles[1]) @ hop_unitary(angles[0])
    # align global phase on the largest entry before comparing
    k = np.unravel_index(np.argmax(np.abs(net)), net.shape)
    if abs(net[k]) < 1e-12 or np.max(np.abs(net * (u[k] / net[k]) - u)) > 1e-9:
        raise AssertionError("hop-angle decomposition failed to reconstruct")
    return angles


class _Builder:
    def __init__(self, wires: int):
        self.edges: list[tuple[int, int]] = []
        self.entries: list[PatternEntry] = []
        self.heads = list(range(wires))
        self.inputs = tuple(self.heads)
        self.x = [set() for _ in range(wires)]
        self.z = [set() for _ in range(wires)]
        self._next = wires

    def hop(self, w: int, angle: float):
        idx = len(self.entries)
        head = self.heads[w]
        fresh = self._next
        self._next += 1
        self.edges.append((head, fresh))
        self.entries.append(
            PatternEntry(head, float(angle), tuple(sorted(self.x[w]))))
        self.x[w], self.z[w] = self.z[w] ^ {idx}, self.x[w]
        self.heads[w] = fresh

    def block(self, w: int, u: np.ndarray):
        for angle in hop_angles_for(u):
            self.hop(w, angle)

    def bridge(self, wa: int, wb: int):
        self.edges.append((self.heads[wa], self.heads[wb]))
        self.z[wa] = self.z[wa] ^ self.x[wb]
        self.z[wb] = self.z[wb] ^ self.x[wa]

    def finish(self) -> tuple[GraphBlueprint, MeasurementPattern]:
        blueprint = GraphBlueprint(
            self._next, tuple(self.edges), self.inputs, tuple(self.heads))
        pattern = MeasurementPattern(
            tuple(self.entries),
            tuple(tuple(sorted(s)) for s in self.x),
            tuple(tuple(sorted(s)) for s in self.z),
        )
        return blueprint, pattern


def hop_chain_pattern(angles) -> tuple[GraphBlueprint, MeasurementPattern]:
    """One wire, one hop per angle; all-zero angles give pure transport."""
    b = _Builder(1)
    for angle in angles:
        b.hop(0, float(angle))
    return b.finish()


def compile_rotation(phi1: float, phi2: float,
                     phi3: float) -> tuple[GraphBlueprint, MeasurementPattern]:
    """Three-hop chain realizing H Uz(-phi3) H Uz(-phi2) H Uz(-phi1)."""
    return hop_chain_pattern((phi1, phi2, phi3))


def compile_circuit(spec: CircuitSpec) -> tuple[GraphBlueprint, MeasurementPattern]:
    """Blueprint and pattern whose frame-corrected run reproduces ``spec``."""
    if spec.num_wires > MAX_WIRES:
        raise SizeLimitError(
            f"{spec.num_wires} wires exceeds the {MAX_WIRES}-wire limit")
    b = _Builder(spec.num_wires)
    for gate in spec.gates:
        if gate[0] == "rz":
            b.block(gate[1], phase_gate(gate[2]))
        elif gate[0] == "h":
            b.block(gate[1], HADAMARD)
        else:
            b.bridge(gate[1], gate[2])
    if b._next > MAX_VERTICES:
        raise SizeLimitError(
            f"{b._next} physical qubits exceeds the {MAX_VERTICES}-qubit limit")
    return b.finish()


def circuit_unitary(spec: CircuitSpec) -> np.ndarray:
    """Dense matrix of the circuit, for oracle comparisons."""
    dim = 1 << spec.num_wires
    u = np.eye(dim, dtype=complex)
    for gate in spec.gates:
        u = _gate_matrix(gate, spec.num_wires) @ u
    return u


def _gate_matrix(gate, wires: int) -> np.ndarray:
    dim = 1 << wires
    if gate[0] == "cz":
        _, a, b = gate
        idx = np.arange(dim)
        mask = ((idx >> a) & 1) & ((idx >> b) & 1)
        return np.diag(np.where(mask == 1, -1.0 + 0j, 1.0 + 0j))
    w = gate[1]
    u = phase_gate(gate[2]) if gate[0] == "rz" else HADAMARD
    m = np.array([1.0 + 0j])
    for q in reversed(range(wires)):
        m = np.kron(m, u if q == w else np.eye(2))
    return m
