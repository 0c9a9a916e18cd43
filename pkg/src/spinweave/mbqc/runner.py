"""Dense execution of measurement patterns with Pauli-frame feed-forward.

Vertices enter the simulated state either lazily (a vertex and its CZ
bonds materialize just before its first measurement touches them) or
eagerly (everything up front).  The two orders act on disjoint
subspaces until a measurement forces them together, so for a fixed seed
they produce the same outcome trace and the same output state.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import statevec as sv
from .patterns import GraphBlueprint, MeasurementPattern, PauliFrame

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


@dataclass(frozen=True)
class RunResult:
    """Raw pattern output: state is uncorrected, qubit w = wire w."""

    state: sv.PureState
    frame: PauliFrame
    outcomes: tuple[int, ...]
    probability: float


def hop_step(state: sv.PureState, phi: float, rng=None, frame: PauliFrame | None = None,
             force: int | None = None) -> tuple[int, sv.PureState, PauliFrame]:
    """Bond a fresh plus vertex to a 1-qubit wire state and hop onto it.

    The measured angle is ``phi`` negated when the frame's X bit is set;
    the surviving qubit carries ``X^m H Uz(-phi)`` applied to the ideal
    wire state, and the returned frame absorbs the byproduct.
    """
    if state.num_qubits != 1:
        raise ValueError("hop_step drives a single-qubit wire state")
    f = frame if frame is not None else PauliFrame.identity(1)
    if len(f.x) != 1:
        raise ValueError("hop_step tracks a single wire")
    angle = -phi if f.x[0] else phi
    joint = sv.apply_cz(sv.tensor(sv.init_plus(1), state), 0, 1)
    out = sv.measure_basis(joint, 0, angle, rng=rng, force=force)
    new_frame = PauliFrame([f.z[0] ^ out.label], [f.x[0]])
    return out.label, out.post_state, new_frame


def _permute_to_wire_order(state: sv.PureState, src: list[int]) -> sv.PureState:
    """Reorder qubits so output wire w sits at qubit w (src[w] = current)."""
    n = state.num_qubits
    if src == list(range(n)):
        return state
    arr = state.amplitudes.reshape((2,) * n)
    axes = [0] * n
    for w, s in enumerate(src):
        axes[n - 1 - w] = n - 1 - s
    return sv.PureState(np.transpose(arr, axes).reshape(-1))


def _validate(blueprint: GraphBlueprint, pattern: MeasurementPattern,
              inputs) -> None:
    wires = blueprint.num_wires
    if len(inputs) != wires:
        raise ValueError(f"pattern drives {wires} wires, got {len(inputs)} inputs")
    for s in inputs:
        if s.num_qubits != 1:
            raise ValueError("wire inputs must be single-qubit states")
    if pattern.frame_x and pattern.num_wires != wires:
        raise ValueError("pattern frame wire count disagrees with blueprint")
    measured = pattern.measured_vertices()
    expected = set(range(blueprint.num_vertices)) - set(blueprint.outputs)
    if measured != expected:
        raise ValueError("pattern must measure every non-output vertex once")


def run_pattern(blueprint: GraphBlueprint, pattern: MeasurementPattern,
                inputs, rng=None, force: tuple[int, ...] | None = None,
                order: str = "lazy") -> RunResult:
    """Execute a pattern on per-wire input states.

    ``force`` post-selects the full outcome tuple (branch enumeration);
    otherwise outcomes are sampled from ``rng``.  The returned state is
    not frame corrected; pass it through :func:`apply_frame`.
    """
    if order not in ("lazy", "eager"):
        raise ValueError("order must be 'lazy' or 'eager'")
    if force is not None and len(force) != len(pattern.entries):
        raise ValueError("force must give one bit per measurement")
    _validate(blueprint, pattern, inputs)

    pos: dict[int, int] = {}
    state = sv.PureState(np.array([1.0 + 0j]))
    applied = [False] * len(blueprint.edges)

    def activate(v: int):
        nonlocal state
        if v in pos:
            return
        wire_states = dict(zip(blueprint.inputs, inputs))
        fresh = wire_states.get(v, sv.init_plus(1))
        pos[v] = state.num_qubits
        state = sv.tensor(fresh, state)

    def bond(v: int):
        nonlocal state
        for k, (a, b) in enumerate(blueprint.edges):
            if applied[k] or v not in (a, b):
                continue
            activate(a)
            activate(b)
            state = sv.apply_cz(state, pos[a], pos[b])
            applied[k] = True

    if order == "eager":
        for v in range(blueprint.num_vertices):
            activate(v)
        for k, (a, b) in enumerate(blueprint.edges):
            state = sv.apply_cz(state, pos[a], pos[b])
            applied[k] = True
    else:
        for v in blueprint.inputs:
            activate(v)

    outcomes: list[int] = []
    probability = 1.0
    for i, entry in enumerate(pattern.entries):
        activate(entry.vertex)
        bond(entry.vertex)
        if entry.is_pauli:
            basis = entry.basis
        else:
            sign = 1.0
            for j in entry.adapt:
                if outcomes[j]:
                    sign = -sign
            basis = sign * float(entry.basis)
        out = sv.measure_basis(state, pos[entry.vertex], basis, rng=rng,
                               force=None if force is None else force[i])
        q = pos.pop(entry.vertex)
        for v in pos:
            if pos[v] > q:
                pos[v] -= 1
        state = out.post_state
        outcomes.append(out.label)
        probability *= out.probability

    # lazy runs can leave output-only bonds unbuilt; settle them now
    for k, (a, b) in enumerate(blueprint.edges):
        if not applied[k]:
            activate(a)
            activate(b)
            state = sv.apply_cz(state, pos[a], pos[b])
            applied[k] = True
    for v in blueprint.outputs:
        activate(v)

    src = [pos[v] for v in blueprint.outputs]
    state = _permute_to_wire_order(state, src)
    outcomes_t = tuple(outcomes)
    if pattern.frame_x:
        frame = PauliFrame.from_outcomes(pattern, outcomes_t)
    else:
        frame = PauliFrame.identity(blueprint.num_wires)
    return RunResult(state, frame, outcomes_t, probability)


def apply_frame(state: sv.PureState, frame: PauliFrame) -> sv.PureState:
    """Undo the recorded byproducts: ideal = Z^z X^x (physical), per wire."""
    if state.num_qubits != len(frame.x):
        raise ValueError("frame wire count disagrees with state")
    out = state
    for w, (x, z) in enumerate(zip(frame.x, frame.z)):
        if x:
            out = sv.apply_1q(out, w, PAULI_X)
        if z:
            out = sv.apply_1q(out, w, PAULI_Z)
    return out
