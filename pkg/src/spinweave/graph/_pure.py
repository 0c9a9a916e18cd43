"""Pure-Python graph-state kernel.

Tracks an undirected graph plus one single-qubit Clifford per vertex
(the "vertex operator"); the represented state is the graph state with
each vertex operator applied on top.  All state changes reduce to edge
toggles and integer table lookups from :mod:`spinweave.cliffords`.

The compiled kernel in ``_fastcore`` implements the same algorithms
move for move; given the same inputs and random bits both produce
identical graphs, operators, and outcomes.
"""

from __future__ import annotations

from .. import cliffords as cl
from ..errors import ZeroProbabilityError

_AXIS_CODE = {"X": cl.AXIS_X, "Y": cl.AXIS_Y, "Z": cl.AXIS_Z}


class PureGraphKernel:
    """Vertex ids are handed out sequentially and never reused."""

    name = "pure"

    def __init__(self):
        self._adj: list[set[int]] = []
        self._vop: list[int] = []
        self._alive: list[bool] = []
        self._num_alive = 0
        self.local_complement_count = 0
        self.table_fuse_count = 0

    # -- bookkeeping ----------------------------------------------------

    def new_vertex(self, vop: int = cl.I_IDX) -> int:
        v = len(self._adj)
        self._adj.append(set())
        self._vop.append(int(vop))
        self._alive.append(True)
        self._num_alive += 1
        return v

    def _check(self, v: int):
        if not (0 <= v < len(self._adj)) or not self._alive[v]:
            raise KeyError(f"no live vertex {v}")

    def num_vertices(self) -> int:
        return self._num_alive

    def vertices(self) -> list[int]:
        return [v for v in range(len(self._adj)) if self._alive[v]]

    def neighbors(self, v: int) -> list[int]:
        self._check(v)
        return sorted(self._adj[v])

    def degree(self, v: int) -> int:
        self._check(v)
        return len(self._adj[v])

    def vop_of(self, v: int) -> int:
        self._check(v)
        return self._vop[v]

    def has_edge(self, a: int, b: int) -> bool:
        self._check(a)
        self._check(b)
        return b in self._adj[a]

    def edge_count(self) -> int:
        return sum(len(self._adj[v]) for v in range(len(self._adj)) if self._alive[v]) // 2

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for v in self.vertices():
            for u in self._adj[v]:
                if u > v:
                    out.append((v, u))
        return sorted(out)

    def _toggle_edge(self, a: int, b: int):
        if b in self._adj[a]:
            self._adj[a].discard(b)
            self._adj[b].discard(a)
        else:
            self._adj[a].add(b)
            self._adj[b].add(a)

    def _remove_vertex(self, v: int):
        for u in self._adj[v]:
            self._adj[u].discard(v)
        self._adj[v] = set()
        self._alive[v] = False
        self._num_alive -= 1

    # -- unitaries -------------------------------------------------------

    def apply_clifford(self, v: int, c: int):
        """Physical single-qubit Clifford on v (left of the vertex op)."""
        self._check(v)
        self._vop[v] = int(cl.MUL[c, self._vop[v]])

    def local_complement(self, u: int):
        """Toggle all edges among N(u); compensate in the vertex operators."""
        self._check(u)
        ngb = sorted(self._adj[u])
        for i in range(len(ngb)):
            for j in range(i + 1, len(ngb)):
                self._toggle_edge(ngb[i], ngb[j])
        self._vop[u] = int(cl.MUL[self._vop[u], cl.SQRT_MINUS_IX])
        for n in ngb:
            self._vop[n] = int(cl.MUL[self._vop[n], cl.SDG_IDX])
        self.local_complement_count += 1

    def _try_reduce(self, v: int, avoid: int):
        """Right-multiply vop[v] toward a diagonal via local complements.

        Move 0 complements at v itself, move 1 at a fixed partner
        neighbor (never ``avoid``).  With no partner available the vop is
        left as is; the caller falls back to the fusion tables.
        """
        word = cl.REDUCE_SEQ[self._vop[v]]
        if not word:
            return
        partner = -1
        if 1 in word:
            choices = self._adj[v] - {avoid}
            if not choices:
                return
            partner = min(choices)
        for move in word:
            self.local_complement(v if move == 0 else partner)

    def add_cz(self, a: int, b: int):
        self._check(a)
        self._check(b)
        if a == b:
            raise ValueError("controlled-Z requires two distinct vertices")
        self._try_reduce(a, b)
        self._try_reduce(b, a)
        self._try_reduce(a, b)
        va, vb = self._vop[a], self._vop[b]
        e = 1 if b in self._adj[a] else 0
        if cl.IS_DIAGONAL[va] and cl.IS_DIAGONAL[vb]:
            self._toggle_edge(a, b)
            return
        # Any operator still non-diagonal here failed reduction, which
        # only happens when its vertex has no neighbor besides the other
        # operand; that isolation is what makes the table rewrite sound.
        if cl.IS_DIAGONAL[vb]:
            assert self._adj[a] <= {b}
            va2, vb2, e2 = cl.T_AFRESH[va, vb, e]
        elif cl.IS_DIAGONAL[va]:
            assert self._adj[b] <= {a}
            vb2, va2, e2 = cl.T_AFRESH[vb, va, e]
        else:
            assert self._adj[a] <= {b} and self._adj[b] <= {a}
            va2, vb2, e2 = cl.T_PAIR[va, vb, e]
        self.table_fuse_count += 1
        self._vop[a], self._vop[b] = int(va2), int(vb2)
        if e2 != e:
            self._toggle_edge(a, b)

    # -- measurement -----------------------------------------------------

    def measure_pauli(self, v: int, axis: str, force=None, draw=None):
        """Measure the physical Pauli ``axis`` on v and remove the vertex.

        Returns ``(outcome, probability)``.  ``draw`` is a zero-argument
        callable producing one bit, invoked only when the outcome is
        genuinely random; ``force`` post-selects instead and raises
        ``ZeroProbabilityError`` on an impossible branch.
        """
        self._check(v)
        try:
            code = _AXIS_CODE[axis.strip().upper()]
        except (KeyError, AttributeError):
            raise ValueError(f"unknown Pauli axis {axis!r}") from None
        c = self._vop[v]
        ax = int(cl.CONJ_AXIS[c, code])
        sgn = int(cl.CONJ_SIGN[c, code])
        if ax == cl.AXIS_X:
            if not self._adj[v]:
                # lone vertex in a +1 eigenstate of its effective X
                out = 0 if sgn > 0 else 1
                if force is not None and int(force) != out:
                    raise ZeroProbabilityError(
                        f"vertex {v} axis {axis} is deterministic; outcome {force} impossible"
                    )
                self._remove_vertex(v)
                return out, 1.0
            self.local_complement(min(self._adj[v]))
            c = self._vop[v]
            ax = int(cl.CONJ_AXIS[c, code])
            sgn = int(cl.CONJ_SIGN[c, code])
        if force is not None:
            out = int(force)
            if out not in (0, 1):
                raise ValueError("forced outcome must be 0 or 1")
        else:
            if draw is None:
                raise ValueError("random measurement needs a bit source")
            out = int(draw()) & 1
        graph_out = out ^ (1 if sgn < 0 else 0)
        ngb = sorted(self._adj[v])
        if ax == cl.AXIS_Y:
            for i in range(len(ngb)):
                for j in range(i + 1, len(ngb)):
                    self._toggle_edge(ngb[i], ngb[j])
            corr = cl.S_IDX if graph_out == 0 else cl.SDG_IDX
            for n in ngb:
                self._vop[n] = int(cl.MUL[self._vop[n], corr])
        else:  # AXIS_Z
            if graph_out == 1:
                for n in ngb:
                    self._vop[n] = int(cl.MUL[self._vop[n], cl.Z_IDX])
        self._remove_vertex(v)
        return out, 0.5

    # -- fused growth loop ------------------------------------------------

    def run_branch_trial(self, tip: int, stack: list[int], success, side, fail_out,
                         collect_trace: bool = False):
        """Grow a branched chain from ``tip`` for ``len(success)`` steps.

        Per step: on success (``success[i]`` true) attach a fresh
        two-vertex cell to the tip through an odd-parity fusion whose
        phase branch is picked by ``side[i]`` (true = the branch fixed up
        with SDG); on failure measure the tip out in Z, sampling
        ``fail_out[i]`` when the outcome is random, and fall back to the
        stack.  Every success counts +2 and every failure -1 toward the
        returned qubit delta; an emptied stack is reseeded with a fresh
        two-vertex cell that is counted but excluded from the delta.
        Returns ``(tip, qubit_delta_sum, reseed_count, trace)``; trace
        entries are (live qubits, edges) after each step when requested.
        """
        steps = len(success)
        delta_sum = 0
        reseeds = 0
        trace = []
        for i in range(steps):
            if success[i]:
                u1 = self.new_vertex()
                u2 = self.new_vertex()
                self.add_cz(u1, u2)
                phase_s = cl.SDG_IDX if side[i] else cl.S_IDX
                self._vop[u1] = int(cl.MUL[phase_s, self._vop[u1]])
                w = self.new_vertex()
                self.add_cz(w, tip)
                self.add_cz(w, u1)
                self.measure_pauli(w, "X", force=1)
                stack.append(u1)
                stack.append(tip)
                tip = u2
                delta_sum += 2
            else:
                bit = int(fail_out[i])
                self.measure_pauli(tip, "Z", draw=lambda: bit)
                delta_sum -= 1
                if stack:
                    tip = stack.pop()
                else:
                    tip = self.new_vertex()
                    u2 = self.new_vertex()
                    self.add_cz(tip, u2)
                    stack.append(tip)
                    tip = u2
                    reseeds += 1
            if collect_trace:
                trace.append((self._num_alive, self.edge_count()))
        return tip, delta_sum, reseeds, trace
