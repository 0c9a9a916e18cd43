"""Strategies for assembling large graph states from probabilistic links.

Two growth styles are provided on top of :class:`~spinweave.graph.register.
GraphRegister`:

* branch growth, where heralded Bell pairs are fused onto the exposed tips
  of a comb-shaped state, a failure costing one qubit and a success adding
  two, so the expected length drift per step is ``3 p - 1``;
* broker/client growth, where every node keeps an optically active broker
  spin next to a storage client spin, link failures being absorbed entirely
  by the brokers.

Model time is accounted as ``attempts * attempt_time``; no wall-clock
numbers enter the statistics.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import cliffords as cl
from .graph.register import GraphRegister, MeasurementRecord

DEFAULT_ATTEMPT_TIME = 200e-9


@dataclass(frozen=True)
class LinkModel:
    """Heralded entangling link: success probability and attempt duration."""

    p_success: float
    attempt_time: float = DEFAULT_ATTEMPT_TIME

    def __post_init__(self):
        if not 0.0 < self.p_success <= 1.0:
            raise ValueError("p_success must lie in (0, 1]")
        if not self.attempt_time > 0.0:
            raise ValueError("attempt_time must be positive")

    @property
    def edge_time(self) -> float:
        """Expected seconds per created edge."""
        return self.attempt_time / self.p_success


@dataclass
class BrokerNode:
    """One network node: a link-facing broker spin plus a storage client spin.

    The broker id is reassigned whenever a failed attempt destroys the
    broker qubit and a fresh one is allocated.
    """

    node_id: str
    broker_qubit: int
    client_qubit: int

    def __post_init__(self):
        if self.broker_qubit == self.client_qubit:
            raise ValueError("broker and client must be distinct qubits")


@dataclass(frozen=True)
class GrowthStats:
    attempts: int
    successes: int
    qubits_in_state: int
    edges_created: int
    model_time: float

    def __post_init__(self):
        if self.successes > self.attempts:
            raise ValueError("successes cannot exceed attempts")


@dataclass(frozen=True)
class BranchOutcome:
    """Result of one branch-growth step."""

    succeeded: bool
    tip: int | None
    phase: complex | None
    delta: int


@dataclass(frozen=True)
class BranchEnsemble:
    per_trial: tuple[GrowthStats, ...]
    mean_drift: float
    stderr: float
    expected_drift: float


@dataclass(frozen=True)
class TraceRow:
    step: int
    attempts: int
    qubits: int
    edges: int
    model_time_ns: int


@dataclass(frozen=True)
class CorrectionRecord:
    """Tracked local Cliffords left on the clients after a brokered fuse.

    Each client's Clifford is also split as ``pauli @ coset_rep`` so frame
    bookkeeping downstream only has to commute the Pauli part.
    """

    measurements: tuple[MeasurementRecord, MeasurementRecord]
    client_vops: tuple[int, int]
    pauli_parts: tuple[int, int]
    coset_reps: tuple[int, int]


def _herald_phase(rng) -> complex:
    # even draw = right-detector herald (+i), odd = left (-i)
    return -1j if rng.integers(0, 2) else 1j


def branch_step(register: GraphRegister, tip: int, link: LinkModel,
                rng) -> BranchOutcome:
    """One heralded attempt to extend a branch at ``tip``.

    Success fuses a fresh two-vertex cell onto the tip (net +2 qubits)
    and returns the cell's free end as the new tip.  Failure measures
    the tip out in Z (net -1) and exposes its former neighbour, if any.
    """
    if tip not in register.vertices():
        raise ValueError(f"tip {tip} is not a live vertex")
    nbrs = register.neighbors(tip)
    if len(nbrs) > 1:
        raise ValueError(f"tip {tip} has degree {len(nbrs)}, not a branch end")
    if rng.random() < link.p_success:
        u1 = register.new_vertex()
        u2 = register.new_vertex()
        register.add_cz(u1, u2)
        phase = _herald_phase(rng)
        register.project_pair_odd(tip, u1, phase)
        return BranchOutcome(True, u2, phase, +2)
    register.measure_pauli(tip, "Z", rng=rng)
    new_tip = nbrs[0] if nbrs else None
    return BranchOutcome(False, new_tip, None, -1)


def _seed_cell(register: GraphRegister) -> tuple[int, list[int]]:
    root = register.new_vertex()
    tip = register.new_vertex()
    register.add_cz(root, tip)
    return tip, [root]


def _predraw(p: float, steps: int, rng):
    success = rng.random(steps) < p
    side = rng.integers(0, 2, steps)
    fail_out = rng.integers(0, 2, steps)
    return success, side, fail_out


def simulate_branch_growth(p: float, steps: int, trials: int, rng,
                           attempt_time: float = DEFAULT_ATTEMPT_TIME,
                           backend: str | None = None) -> BranchEnsemble:
    """Monte Carlo branch growth; reports mean qubit drift per step.

    Every trial drives a private register through ``steps`` pre-drawn
    heralds, so the trace is backend independent.  Reseeds after a
    stack-emptying failure are excluded from the drift.
    """
    if steps < 1 or trials < 1:
        raise ValueError("steps and trials must be at least 1")
    link = LinkModel(p, attempt_time)
    drifts = np.empty(trials)
    stats = []
    for t in range(trials):
        register = GraphRegister(backend)
        tip, stack = _seed_cell(register)
        success, side, fail_out = _predraw(p, steps, rng)
        _, delta_sum, reseeds, _ = register.run_branch_trial(
            tip, stack, success, side, fail_out)
        n_succ = int(success.sum())
        drifts[t] = delta_sum / steps
        stats.append(GrowthStats(
            attempts=steps,
            successes=n_succ,
            qubits_in_state=register.num_vertices(),
            edges_created=2 * n_succ + reseeds,
            model_time=steps * link.attempt_time,
        ))
    mean = float(drifts.mean())
    stderr = float(drifts.std(ddof=1) / np.sqrt(trials)) if trials > 1 else 0.0
    return BranchEnsemble(tuple(stats), mean, stderr, 3.0 * p - 1.0)


def branch_growth_trace(p: float, steps: int, rng,
                        attempt_time: float = DEFAULT_ATTEMPT_TIME,
                        backend: str | None = None) -> list[TraceRow]:
    """Single traced trial: per-step register size and model time."""
    if steps < 1:
        raise ValueError("steps must be at least 1")
    link = LinkModel(p, attempt_time)
    register = GraphRegister(backend)
    tip, stack = _seed_cell(register)
    success, side, fail_out = _predraw(p, steps, rng)
    _, _, _, trace = register.run_branch_trial(
        tip, stack, success, side, fail_out, collect_trace=True)
    rows = []
    for i, (qubits, edges) in enumerate(trace):
        attempts = i + 1
        rows.append(TraceRow(
            step=i,
            attempts=attempts,
            qubits=qubits,
            edges=edges,
            model_time_ns=round(attempts * link.attempt_time * 1e9),
        ))
    return rows


TRACE_COLUMNS = ("step", "attempts", "qubits", "edges", "model_time_ns")


def write_trace_csv(rows: list[TraceRow], fh) -> None:
    writer = csv.writer(fh)
    writer.writerow(TRACE_COLUMNS)
    for r in rows:
        writer.writerow([r.step, r.attempts, r.qubits, r.edges, r.model_time_ns])


def broker_bell(a: BrokerNode, b: BrokerNode, link: LinkModel,
                register: GraphRegister, rng) -> int:
    """Entangle the two broker qubits, retrying until the link heralds.

    A failed attempt scrambles only the brokers: both are measured out
    and replaced by fresh plus-state qubits, so any client entanglement
    already in the register is untouched.  Returns the attempt count.
    """
    attempts = 0
    while True:
        attempts += 1
        if rng.random() < link.p_success:
            register.project_pair_odd(a.broker_qubit, b.broker_qubit,
                                      _herald_phase(rng))
            return attempts
        register.measure_pauli(a.broker_qubit, "Z", rng=rng)
        register.measure_pauli(b.broker_qubit, "Z", rng=rng)
        a.broker_qubit = register.new_vertex()
        b.broker_qubit = register.new_vertex()


def broker_to_client_edge(a: BrokerNode, b: BrokerNode,
                          register: GraphRegister,
                          rng=None) -> CorrectionRecord:
    """Swap a broker-broker pair onto the clients as a graph edge.

    Each broker is bonded to its own client by a CZ and then measured
    out in the y-basis; the leftover single-qubit corrections stay in
    the register's tracked Cliffords and are reported for bookkeeping.
    """
    if not register.has_edge(a.broker_qubit, b.broker_qubit):
        raise ValueError("brokers are not entangled; run broker_bell first")
    register.add_cz(a.broker_qubit, a.client_qubit)
    register.add_cz(b.broker_qubit, b.client_qubit)
    ma = register.measure_pauli(a.broker_qubit, "Y", rng=rng)
    mb = register.measure_pauli(b.broker_qubit, "Y", rng=rng)
    vops = (register.vop_of(a.client_qubit), register.vop_of(b.client_qubit))
    return CorrectionRecord(
        measurements=(ma, mb),
        client_vops=vops,
        pauli_parts=tuple(int(cl.LEFT_PAULI[v]) for v in vops),
        coset_reps=tuple(int(cl.COSET_REP[v]) for v in vops),
    )
