"""Branch and broker/client growth strategies."""

import csv
import io

import numpy as np
import pytest

from spinweave import cliffords as cl
from spinweave import statevec as sv
from spinweave.graph.register import GraphRegister
from spinweave.growth import (
    BranchOutcome,
    BrokerNode,
    GrowthStats,
    LinkModel,
    TRACE_COLUMNS,
    branch_growth_trace,
    branch_step,
    broker_bell,
    broker_to_client_edge,
    simulate_branch_growth,
    write_trace_csv,
)


class ScriptedLink:
    """rng stand-in that fails a fixed number of attempts, then succeeds."""

    def __init__(self, failures, seed=0):
        self.failures = failures
        self.inner = np.random.default_rng(seed)

    def random(self, *args):
        if self.failures > 0:
            self.failures -= 1
            return 0.999999999
        return 0.0

    def integers(self, low, high, size=None):
        return self.inner.integers(low, high, size)


def seeded_chain(register, n):
    ids = [register.new_vertex() for _ in range(n)]
    for a, b in zip(ids, ids[1:]):
        register.add_cz(a, b)
    return ids


def consume_corrections(register, vertices):
    for v in vertices:
        register.apply_clifford(v, int(cl.ADJ[register.vop_of(v)]))


def dense_over(register, wanted):
    state, order = register.to_dense()
    assert sorted(wanted) == sorted(order)
    pos = [order.index(v) for v in sorted(wanted)]
    # order is ascending already, so this is the identity permutation
    assert pos == sorted(pos)
    return state


class TestLinkModel:
    def test_validation(self):
        with pytest.raises(ValueError):
            LinkModel(0.0)
        with pytest.raises(ValueError):
            LinkModel(1.5)
        with pytest.raises(ValueError):
            LinkModel(0.5, attempt_time=0.0)

    def test_edge_time(self):
        assert LinkModel(5e-5, 200e-9).edge_time == pytest.approx(4e-3, rel=1e-12)
        assert LinkModel(0.125, 1e-9).edge_time == pytest.approx(8e-9, rel=1e-12)
        assert LinkModel(1.0, 7e-8).edge_time == 7e-8


class TestDomainTypes:
    def test_broker_equal_to_client_rejected(self):
        with pytest.raises(ValueError):
            BrokerNode("n", 3, 3)

    def test_stats_successes_bounded(self):
        with pytest.raises(ValueError):
            GrowthStats(attempts=2, successes=3, qubits_in_state=0,
                        edges_created=0, model_time=1.0)


class TestBranchStep:
    def test_certain_success_grows_by_two(self, rng):
        reg = GraphRegister()
        a, b = seeded_chain(reg, 2)
        tip = b
        for step in range(6):
            before = reg.num_vertices()
            out = branch_step(reg, tip, LinkModel(1.0), rng)
            assert out.succeeded and out.delta == 2
            assert out.phase in (1j, -1j)
            assert reg.num_vertices() == before + 2
            tip = out.tip
        # comb never forms: every fuse lands on a degree-1 tip, so a line
        assert reg.edge_count() == reg.num_vertices() - 1

    def test_failure_shrinks_by_one(self, rng):
        reg = GraphRegister()
        ids = seeded_chain(reg, 3)
        out = branch_step(reg, ids[-1], LinkModel(1e-15), rng)
        assert not out.succeeded and out.delta == -1
        assert out.tip == ids[-2]
        assert reg.num_vertices() == 2

    def test_failure_on_isolated_tip_exhausts_branch(self, rng):
        reg = GraphRegister()
        lone = reg.new_vertex()
        out = branch_step(reg, lone, LinkModel(1e-15), rng)
        assert out.tip is None
        assert reg.num_vertices() == 0

    def test_rejects_interior_vertex(self, rng):
        reg = GraphRegister()
        ids = seeded_chain(reg, 3)
        with pytest.raises(ValueError):
            branch_step(reg, ids[1], LinkModel(1.0), rng)

    def test_rejects_dead_vertex(self, rng):
        reg = GraphRegister()
        v = reg.new_vertex()
        reg.measure_pauli(v, "Z", force=0)
        with pytest.raises(ValueError):
            branch_step(reg, v, LinkModel(1.0), rng)


class TestSimulateBranchGrowth:
    @pytest.mark.parametrize("p", [0.2, 1.0 / 3.0, 0.5, 0.9])
    def test_drift_matches_expectation(self, p):
        rng = np.random.default_rng(999)
        ens = simulate_branch_growth(p, steps=2000, trials=30, rng=rng)
        band = 4 * max(ens.stderr, 1e-9)
        assert abs(ens.mean_drift - ens.expected_drift) < band

    def test_stats_invariants(self):
        rng = np.random.default_rng(4)
        ens = simulate_branch_growth(0.4, steps=500, trials=5, rng=rng,
                                     attempt_time=1e-6)
        assert len(ens.per_trial) == 5
        for st in ens.per_trial:
            assert st.attempts == 500
            assert 0 <= st.successes <= st.attempts
            assert st.model_time == 500 * 1e-6
            assert st.qubits_in_state >= 1
            assert st.edges_created >= 2 * st.successes

    def test_backends_agree_exactly(self):
        from spinweave.graph.backends import available_backends
        if "compiled" not in available_backends():
            pytest.skip("compiled kernel not built")
        a = simulate_branch_growth(0.45, 300, 8, np.random.default_rng(77),
                                   backend="pure")
        b = simulate_branch_growth(0.45, 300, 8, np.random.default_rng(77),
                                   backend="compiled")
        assert a.per_trial == b.per_trial
        assert a.mean_drift == b.mean_drift

    def test_validation(self):
        with pytest.raises(ValueError):
            simulate_branch_growth(0.5, 0, 3, np.random.default_rng(0))
        with pytest.raises(ValueError):
            simulate_branch_growth(0.5, 3, 0, np.random.default_rng(0))


class TestGrowthTrace:
    def test_rows_and_csv(self):
        rows = branch_growth_trace(0.6, 40, np.random.default_rng(8),
                                   attempt_time=200e-9)
        assert len(rows) == 40
        for i, r in enumerate(rows):
            assert r.step == i
            assert r.attempts == i + 1
            assert r.model_time_ns == (i + 1) * 200
            assert r.qubits >= 1 and r.edges >= 0
        buf = io.StringIO()
        write_trace_csv(rows, buf)
        buf.seek(0)
        parsed = list(csv.reader(buf))
        assert parsed[0] == list(TRACE_COLUMNS)
        assert len(parsed) == 41
        assert parsed[1] == ["0", "1", str(rows[0].qubits),
                             str(rows[0].edges), "200"]


class TestBrokerBell:
    def fresh_pair(self, reg):
        ca, cb = reg.new_vertex(), reg.new_vertex()
        ba, bb = reg.new_vertex(), reg.new_vertex()
        return BrokerNode("a", ba, ca), BrokerNode("b", bb, cb)

    def test_certain_link_takes_one_attempt(self, rng):
        reg = GraphRegister()
        a, b = self.fresh_pair(reg)
        assert broker_bell(a, b, LinkModel(1.0), reg, rng) == 1
        assert reg.has_edge(a.broker_qubit, b.broker_qubit)

    def test_attempt_count_is_geometric(self):
        p = 0.25
        rng = np.random.default_rng(31)
        counts = []
        runs, chunk = 4000, 400
        for start in range(0, runs, chunk):
            reg = GraphRegister()
            for _ in range(chunk):
                a, b = self.fresh_pair(reg)
                counts.append(broker_bell(a, b, LinkModel(p), reg, rng))
                # park the finished pair so the next run starts fresh
                reg.measure_pauli(a.broker_qubit, "Z", rng=rng)
                reg.measure_pauli(b.broker_qubit, "Z", rng=rng)
                reg.measure_pauli(a.client_qubit, "Z", rng=rng)
                reg.measure_pauli(b.client_qubit, "Z", rng=rng)
        counts = np.asarray(counts, dtype=float)
        mean = counts.mean()
        sigma = np.sqrt((1 - p) / p**2 / runs)
        assert abs(mean - 1 / p) < 4 * sigma

    def test_failures_leave_clients_untouched(self):
        reg = GraphRegister()
        a, b = self.fresh_pair(reg)
        reg.add_cz(a.client_qubit, b.client_qubit)
        reg.apply_clifford(a.client_qubit, "S")
        before = dense_over(reg, [a.client_qubit, b.client_qubit,
                                  a.broker_qubit, b.broker_qubit])
        rho_before = sv.reduced_density(before, [0, 1])
        attempts = broker_bell(a, b, LinkModel(0.5), reg, ScriptedLink(25))
        assert attempts == 26
        after = dense_over(reg, [a.client_qubit, b.client_qubit,
                                 a.broker_qubit, b.broker_qubit])
        rho_after = sv.reduced_density(after, [0, 1])
        assert np.max(np.abs(rho_after.matrix - rho_before.matrix)) < 1e-12


class TestBrokerToClientEdge:
    def test_requires_entangled_brokers(self, rng):
        reg = GraphRegister()
        a = BrokerNode("a", reg.new_vertex(), reg.new_vertex())
        b = BrokerNode("b", reg.new_vertex(), reg.new_vertex())
        with pytest.raises(ValueError):
            broker_to_client_edge(a, b, reg, rng)

    def full_protocol(self, reg, rng, failures=0):
        ca, cb = reg.new_vertex(), reg.new_vertex()
        a = BrokerNode("a", reg.new_vertex(), ca)
        b = BrokerNode("b", reg.new_vertex(), cb)
        link = ScriptedLink(failures) if failures else rng
        broker_bell(a, b, LinkModel(0.5), reg, link)
        return a, b, broker_to_client_edge(a, b, reg, rng)

    def test_fresh_nodes_yield_graph_edge(self, rng):
        reg = GraphRegister()
        a, b, record = self.full_protocol(reg, rng)
        assert reg.has_edge(a.client_qubit, b.client_qubit)
        consume_corrections(reg, [a.client_qubit, b.client_qubit])
        state = dense_over(reg, [a.client_qubit, b.client_qubit])
        target = sv.apply_cz(sv.init_plus(2), 0, 1)
        assert np.max(np.abs(state.amplitudes - target.amplitudes)) < 1e-12

    def test_two_pairs_stay_disjoint(self, rng):
        reg = GraphRegister()
        a1, b1, _ = self.full_protocol(reg, rng)
        a2, b2, _ = self.full_protocol(reg, rng)
        assert reg.has_edge(a1.client_qubit, b1.client_qubit)
        assert reg.has_edge(a2.client_qubit, b2.client_qubit)
        assert not reg.has_edge(a1.client_qubit, a2.client_qubit)
        assert not reg.has_edge(b1.client_qubit, b2.client_qubit)
        assert reg.edge_count() == 2

    def test_extends_client_chain(self, rng):
        reg = GraphRegister()
        chain = seeded_chain(reg, 3)
        new_client = reg.new_vertex()
        a = BrokerNode("end", reg.new_vertex(), chain[-1])
        b = BrokerNode("new", reg.new_vertex(), new_client)
        broker_bell(a, b, LinkModel(0.5), reg, ScriptedLink(7, seed=3))
        broker_to_client_edge(a, b, reg, rng)
        clients = chain + [new_client]
        consume_corrections(reg, clients)
        state = dense_over(reg, clients)
        target = sv.init_plus(4)
        for q1, q2 in ((0, 1), (1, 2), (2, 3)):
            target = sv.apply_cz(target, q1, q2)
        assert np.max(np.abs(state.amplitudes - target.amplitudes)) < 1e-12

    def test_record_decomposition_consistent(self, rng):
        reg = GraphRegister()
        _, _, record = self.full_protocol(reg, rng, failures=3)
        paulis = (cl.I_IDX, cl.X_IDX, cl.Y_IDX, cl.Z_IDX)
        for vop, pauli, rep in zip(record.client_vops, record.pauli_parts,
                                   record.coset_reps):
            assert vop == int(cl.MUL[paulis[pauli], rep])
