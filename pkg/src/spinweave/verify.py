"""Built-in self checks: each suite replays a core claim against an oracle.

Three suites ship:

* ``graph``   - random Clifford/fusion/measurement sequences driven through
  the graph register and a dense state vector side by side.
* ``pattern`` - adaptive measurement patterns, every outcome branch compared
  against the direct unitary after frame correction.
* ``growth``  - broker insulation: failed link attempts must leave client
  reduced states untouched, and a brokered edge must land on the canonical
  two-qubit graph state once corrections are consumed.

The drivers take counts as parameters so the same code backs both the quick
command-line check and the heavyweight test-suite runs.  Every driver is
deterministic given its seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import cliffords as cl
from . import statevec as sv
from .errors import ZeroProbabilityError
from .graph.register import GraphRegister
from .growth import BrokerNode, LinkModel, broker_bell, broker_to_client_edge
from .mbqc import (GraphBlueprint, MeasurementPattern, PatternEntry,
                   apply_frame, compile_rotation, hop_unitary, run_pattern)

__all__ = [
    "SUITES",
    "SuiteResult",
    "VerifyReport",
    "broker_insulation_driver",
    "bridge_branches_driver",
    "mirror_sequence_driver",
    "rotation_branches_driver",
    "run_verify",
]

SUITES = ("graph", "pattern", "growth")
_ALIASES = {"broker": "growth"}


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    checks: int
    worst: float
    tolerance: float
    detail: str

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "checks": self.checks,
            "worst": self.worst,
            "tolerance": self.tolerance,
            "detail": self.detail,
        }


@dataclass(frozen=True)
class VerifyReport:
    results: tuple[SuiteResult, ...]

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def as_dict(self) -> dict:
        return {
            "passed": self.passed,
            "suites": [r.as_dict() for r in self.results],
        }


def _overlap_deficit(a: sv.PureState, b: sv.PureState) -> float:
    return abs(1.0 - abs(complex(np.vdot(a.amplitudes, b.amplitudes))))


class _Mirror:
    """One register and one dense state fed identical operations."""

    def __init__(self, seed, backend=None, sabotage=False):
        self.reg = GraphRegister(backend=backend)
        self.state = sv.init_plus(0)
        self.rng = np.random.default_rng(seed)
        self.worst = 0.0
        if sabotage:
            # poison the dense side only; the comparison must notice
            self.sabotage_gate = cl.X_IDX
        else:
            self.sabotage_gate = None

    def pos(self, v):
        return self.reg.vertices().index(v)

    def add_vertex(self):
        v = self.reg.new_vertex()
        self.state = sv.tensor(sv.qubit_state("+"), self.state)
        return v

    def clifford(self, v, c):
        self.reg.apply_clifford(v, c)
        self.state = sv.apply_1q(self.state, self.pos(v), cl.MATS[c])

    def cz(self, a, b):
        self.reg.add_cz(a, b)
        self.state = sv.apply_cz(self.state, self.pos(a), self.pos(b))

    def measure(self, v, axis):
        q = self.pos(v)
        p0, _ = sv.measure_probabilities(self.state, q, axis)
        outcome = 0 if self.rng.random() < p0 else 1
        rec = self.reg.measure_pauli(v, axis, force=outcome)
        out = sv.measure_basis(self.state, q, axis, force=outcome)
        self.worst = max(self.worst, abs(rec.probability - out.probability))
        self.state = out.post_state

    def project(self, t, u, phase):
        qt, qu = self.pos(t), self.pos(u)
        idx = np.arange(self.state.amplitudes.size)
        mask = ((idx >> qt) & 1) ^ ((idx >> qu) & 1)
        amps = self.state.amplitudes * mask
        amps = np.where(((idx >> qu) & 1) == 1, amps * phase, amps)
        prob = float(np.vdot(amps, amps).real)
        if prob < 1e-12:
            raise ZeroProbabilityError("no odd-parity weight")
        rec = self.reg.project_pair_odd(t, u, phase)
        self.worst = max(self.worst, abs(rec.probability - prob))
        self.state = sv.PureState(amps / math.sqrt(prob))

    def check(self):
        if self.sabotage_gate is not None:
            q = int(self.rng.integers(self.state.num_qubits))
            self.state = sv.apply_1q(self.state, q, cl.MATS[self.sabotage_gate])
            self.sabotage_gate = None
        got, _ = self.reg.to_dense()
        self.worst = max(self.worst, _overlap_deficit(got, self.state))


def mirror_sequence_driver(seed, steps=40, max_qubits=8, backend=None,
                           check_every=None, sabotage=False) -> float:
    """One random operation sequence; returns the worst deviation seen.

    check_every=None compares graph-to-dense only at the end; an integer
    compares every that-many steps as well.
    """
    m = _Mirror(seed, backend=backend, sabotage=sabotage)
    live = [m.add_vertex(), m.add_vertex()]
    for step in range(steps):
        roll = m.rng.random()
        if roll < 0.18 and len(live) < max_qubits:
            live.append(m.add_vertex())
        elif roll < 0.44:
            v = live[m.rng.integers(len(live))]
            m.clifford(v, int(m.rng.integers(cl.SIZE)))
        elif roll < 0.72 and len(live) >= 2:
            a, b = m.rng.choice(len(live), size=2, replace=False)
            m.cz(live[int(a)], live[int(b)])
        elif roll < 0.86 and len(live) >= 3:
            a, b = m.rng.choice(len(live), size=2, replace=False)
            phase = 1j if m.rng.integers(2) else -1j
            try:
                m.project(live[int(a)], live[int(b)], phase)
            except ZeroProbabilityError:
                pass
        elif len(live) >= 3:
            v = live[m.rng.integers(len(live))]
            m.measure(v, "XYZ"[m.rng.integers(3)])
            live.remove(v)
        if check_every is not None and step % check_every == 0:
            m.check()
        if len(live) < 2:
            live.append(m.add_vertex())
    m.check()
    return m.worst


def _random_qubit(rng) -> sv.PureState:
    amps = rng.normal(size=2) + 1j * rng.normal(size=2)
    return sv.PureState(amps / np.linalg.norm(amps))


def rotation_branches_driver(seed, count=10, order="lazy") -> tuple[int, float]:
    """Adaptive three-hop chains: every branch against the net unitary.

    Returns (branches checked, worst deviation), where the deviation
    covers both the corrected state overlap and total branch probability.
    """
    rng = np.random.default_rng(seed)
    checks = 0
    worst = 0.0
    for _ in range(count):
        angles = tuple(float(a) for a in rng.uniform(-np.pi, np.pi, size=3))
        blueprint, pattern = compile_rotation(*angles)
        net = (hop_unitary(angles[2]) @ hop_unitary(angles[1])
               @ hop_unitary(angles[0]))
        source = _random_qubit(rng)
        expect = sv.PureState(net @ source.amplitudes)
        total = 0.0
        for bits in range(8):
            force = tuple((bits >> i) & 1 for i in range(3))
            res = run_pattern(blueprint, pattern, (source,),
                              force=force, order=order)
            got = apply_frame(res.state, res.frame)
            worst = max(worst, _overlap_deficit(got, expect))
            total += res.probability
            checks += 1
        worst = max(worst, abs(total - 1.0))
    return checks, worst


def bridge_gadget() -> tuple[GraphBlueprint, MeasurementPattern, np.ndarray]:
    """Two wires joined mid-chain by an edge, plus the unitary it enacts."""
    blueprint = GraphBlueprint(
        num_vertices=6,
        edges=((0, 2), (2, 4), (1, 3), (3, 5), (2, 3)),
        inputs=(0, 1),
        outputs=(4, 5),
    )
    pattern = MeasurementPattern(
        entries=(
            PatternEntry(0, 0.0),
            PatternEntry(1, 0.0),
            PatternEntry(2, 0.0, adapt=(0,)),
            PatternEntry(3, 0.0, adapt=(1,)),
        ),
        frame_x=((1, 2), (0, 3)),
        frame_z=((0,), (1,)),
    )
    h2 = np.kron(cl.MATS[cl.H_IDX], cl.MATS[cl.H_IDX])
    cz = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    return blueprint, pattern, h2 @ cz @ h2


def bridge_branches_driver(seed, inputs_count=3, order="lazy") -> tuple[int, float]:
    """All 16 outcome branches of the bridge gadget on random inputs."""
    rng = np.random.default_rng(seed)
    blueprint, pattern, net = bridge_gadget()
    checks = 0
    worst = 0.0
    for _ in range(inputs_count):
        a, b = _random_qubit(rng), _random_qubit(rng)
        expect = sv.PureState(net @ sv.tensor(b, a).amplitudes)
        total = 0.0
        for bits in range(16):
            force = tuple((bits >> i) & 1 for i in range(4))
            res = run_pattern(blueprint, pattern, (a, b),
                              force=force, order=order)
            got = apply_frame(res.state, res.frame)
            worst = max(worst, _overlap_deficit(got, expect))
            total += res.probability
            checks += 1
        worst = max(worst, abs(total - 1.0))
    return checks, worst


def _client_density(register: GraphRegister, clients) -> np.ndarray:
    state, order = register.to_dense()
    keep = [order.index(c) for c in clients]
    return sv.reduced_density(state, keep).matrix


def broker_insulation_driver(seed, min_failures=100, p_success=0.2,
                             backend=None) -> tuple[int, int, float]:
    """Repeated brokered bells over protected client entanglement.

    Returns (failures seen, edge checks, worst deviation).  The client
    pair starts with its own entangled state; every bell consumes and
    replaces the brokers while the clients' reduced density matrix has
    to stay put.  Each successful bell is then swapped onto the clients
    of a fresh register and compared against the two-qubit graph state.
    """
    rng = np.random.default_rng(seed)
    link = LinkModel(p_success, 1.0)
    register = GraphRegister(backend=backend)
    nodes = [BrokerNode(i, register.new_vertex(), register.new_vertex())
             for i in range(2)]
    clients = [n.client_qubit for n in nodes]
    register.add_cz(clients[0], clients[1])
    register.apply_clifford(clients[0], cl.S_IDX)
    baseline = _client_density(register, clients)
    failures = 0
    worst = 0.0
    while failures < min_failures:
        attempts = broker_bell(nodes[0], nodes[1], link, register, rng)
        failures += attempts - 1
        rho = _client_density(register, clients)
        worst = max(worst, float(np.abs(rho - baseline).max()))
        # clear the bell so the next round starts from fresh brokers
        register.measure_pauli(nodes[0].broker_qubit, "Z", rng=rng)
        register.measure_pauli(nodes[1].broker_qubit, "Z", rng=rng)
        nodes[0].broker_qubit = register.new_vertex()
        nodes[1].broker_qubit = register.new_vertex()

    # brokered-edge structure on fresh nodes, corrections consumed
    edge_checks = 5
    target = sv.apply_cz(sv.init_plus(2), 0, 1)
    for _ in range(edge_checks):
        reg = GraphRegister(backend=backend)
        pair = [BrokerNode(i, reg.new_vertex(), reg.new_vertex())
                for i in range(2)]
        broker_bell(pair[0], pair[1], LinkModel(1.0, 1.0), reg, rng)
        broker_to_client_edge(pair[0], pair[1], reg, rng=rng)
        if not reg.has_edge(pair[0].client_qubit, pair[1].client_qubit):
            worst = max(worst, 1.0)
        for node in pair:
            vop = reg.vop_of(node.client_qubit)
            reg.apply_clifford(node.client_qubit, int(cl.ADJ[vop]))
        state, _ = reg.to_dense()
        worst = max(worst, _overlap_deficit(state, target))
    return failures, edge_checks, worst


def _suite_graph(seed) -> SuiteResult:
    tol = 1e-10
    worst = 0.0
    trials = 25
    for t in range(trials):
        worst = max(worst, mirror_sequence_driver(seed + t, steps=40,
                                                  max_qubits=8,
                                                  check_every=4))
    return SuiteResult("graph", worst <= tol, trials, worst, tol,
                       f"{trials} random register-vs-dense sequences")


def _suite_pattern(seed) -> SuiteResult:
    tol = 1e-10
    c1, w1 = rotation_branches_driver(seed, count=10)
    c2, w2 = bridge_branches_driver(seed + 1, inputs_count=3)
    worst = max(w1, w2)
    return SuiteResult("pattern", worst <= tol, c1 + c2, worst, tol,
                       "rotation chains and the bridge gadget, all branches")


def _suite_growth(seed) -> SuiteResult:
    tol = 1e-12
    failures, edges, worst = broker_insulation_driver(seed, min_failures=100)
    return SuiteResult("growth", worst <= tol, failures + edges, worst, tol,
                       f"{failures} broker failures plus {edges} edge swaps")


_SUITE_FNS = {
    "graph": _suite_graph,
    "pattern": _suite_pattern,
    "growth": _suite_growth,
}


def _injected_failure(seed) -> SuiteResult:
    worst = mirror_sequence_driver(seed, steps=12, max_qubits=4,
                                   sabotage=True)
    detected = worst > 1e-10
    detail = ("deliberate dense-side corruption; deviation "
              + ("detected" if detected else "MISSED"))
    return SuiteResult("inject-failure", False, 1, worst, 1e-10, detail)


def run_verify(selector: str = "all", seed: int = 20260816,
               inject_failure: bool = False) -> VerifyReport:
    """Run the named suite (or all) and collect a pass/fail report."""
    name = _ALIASES.get(selector, selector)
    if name == "all":
        chosen = list(SUITES)
    elif name in _SUITE_FNS:
        chosen = [name]
    else:
        raise ValueError(f"unknown verify suite {selector!r}; "
                         f"pick one of {('all',) + SUITES}")
    results = [_SUITE_FNS[s](seed) for s in chosen]
    if inject_failure:
        results.append(_injected_failure(seed))
    return VerifyReport(tuple(results))
