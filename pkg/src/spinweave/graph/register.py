"""Graph-state register: the user-facing wrapper around a kernel.

Vertices are integer ids handed out once and never reused; measuring a
vertex removes it.  ``to_dense`` exports the tracked state as a dense
vector for oracle comparisons, with qubit i the i-th smallest live id.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import cliffords as cl
from .. import statevec as sv
from ..errors import ZeroProbabilityError
from .backends import available_backends, select_backend

CLIFFORD_NAMES = {
    "I": cl.I_IDX,
    "X": cl.X_IDX,
    "Y": cl.Y_IDX,
    "Z": cl.Z_IDX,
    "H": cl.H_IDX,
    "S": cl.S_IDX,
    "SDG": cl.SDG_IDX,
}


@dataclass(frozen=True)
class MeasurementRecord:
    vertex: int
    axis: str
    outcome: int
    probability: float


@dataclass(frozen=True)
class ProjectionRecord:
    """Odd-parity fusion of two vertices with a side-dependent phase."""

    kept: tuple[int, int]
    phase: complex
    probability: float


class GraphRegister:
    def __init__(self, backend: str | None = None):
        kernel_cls = select_backend(backend)
        self._kernel = kernel_cls()
        self.backend_name = next(
            nm for nm, cls in available_backends().items() if cls is kernel_cls
        )

    # -- structure --------------------------------------------------------

    def new_vertex(self) -> int:
        """Fresh vertex in the x-basis plus state."""
        return self._kernel.new_vertex()

    def num_vertices(self) -> int:
        return self._kernel.num_vertices()

    def vertices(self) -> list[int]:
        return self._kernel.vertices()

    def neighbors(self, v: int) -> list[int]:
        return self._kernel.neighbors(v)

    def has_edge(self, a: int, b: int) -> bool:
        return self._kernel.has_edge(a, b)

    def edges(self) -> list[tuple[int, int]]:
        return self._kernel.edges()

    def edge_count(self) -> int:
        return self._kernel.edge_count()

    def vop_of(self, v: int) -> int:
        return self._kernel.vop_of(v)

    def adjacency(self) -> dict[int, list[int]]:
        return {v: self._kernel.neighbors(v) for v in self._kernel.vertices()}

    # -- operations --------------------------------------------------------

    def apply_clifford(self, v: int, gate: int | str):
        if isinstance(gate, str):
            try:
                gate = CLIFFORD_NAMES[gate.strip().upper()]
            except KeyError:
                raise ValueError(f"unknown Clifford name {gate!r}") from None
        if not (0 <= int(gate) < cl.SIZE):
            raise ValueError(f"Clifford index {gate} out of range")
        self._kernel.apply_clifford(v, int(gate))

    def add_cz(self, a: int, b: int):
        self._kernel.add_cz(a, b)

    def local_complement(self, v: int):
        self._kernel.local_complement(v)

    def measure_pauli(
        self,
        v: int,
        axis: str,
        rng: np.random.Generator | None = None,
        force: int | None = None,
    ) -> MeasurementRecord:
        draw = None if rng is None else (lambda: int(rng.integers(0, 2)))
        outcome, prob = self._kernel.measure_pauli(v, axis, force=force, draw=draw)
        return MeasurementRecord(v, axis.strip().upper(), int(outcome), float(prob))

    def project_pair_odd(self, t: int, u: int, phase: complex) -> ProjectionRecord:
        """Project (t, u) onto odd parity with amplitude ``phase`` on t=0,u=1.

        Realized as a phase fix-up on u followed by an ancilla fused to
        both vertices and measured out.  When the pair holds no
        odd-parity weight this raises ``ZeroProbabilityError`` and leaves
        the register state untouched.
        """
        if phase == 1j:
            fixup, undo = cl.S_IDX, cl.SDG_IDX
        elif phase == -1j:
            fixup, undo = cl.SDG_IDX, cl.S_IDX
        else:
            raise ValueError("projection phase must be +1j or -1j")
        self.apply_clifford(u, fixup)
        w = self._kernel.new_vertex()
        self._kernel.add_cz(w, t)
        self._kernel.add_cz(w, u)
        try:
            _, prob = self._kernel.measure_pauli(w, "X", force=1)
        except ZeroProbabilityError:
            # Unwind: CZ is self-inverse, after which the ancilla is back
            # in its product state and can be discarded silently.
            self._kernel.add_cz(w, u)
            self._kernel.add_cz(w, t)
            self._kernel.measure_pauli(w, "X", draw=lambda: 0)
            self.apply_clifford(u, undo)
            raise
        return ProjectionRecord((t, u), phase, float(prob))

    def run_branch_trial(self, tip, stack, success, side, fail_out, collect_trace=False):
        return self._kernel.run_branch_trial(tip, stack, success, side, fail_out, collect_trace)

    # -- export -------------------------------------------------------------

    def to_dense(self) -> tuple[sv.PureState, list[int]]:
        """Dense state over live vertices plus the id order used."""
        order = self._kernel.vertices()
        pos = {v: i for i, v in enumerate(order)}
        state = sv.init_plus(len(order))
        for a, b in self._kernel.edges():
            state = sv.apply_cz(state, pos[a], pos[b])
        for v in order:
            c = self._kernel.vop_of(v)
            if c != cl.I_IDX:
                state = sv.apply_1q(state, pos[v], cl.MATS[c])
        return state, order

    def stats(self) -> dict[str, int]:
        return {
            "local_complements": self._kernel.local_complement_count,
            "table_fuses": self._kernel.table_fuse_count,
        }
