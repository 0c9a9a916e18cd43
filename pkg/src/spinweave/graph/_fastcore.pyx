# cython: language_level=3, boundscheck=False, wraparound=False, initializedcheck=False
"""Compiled graph-state kernel.

Same algorithms as ``spinweave.graph._pure.PureGraphKernel``, move for
move: identical inputs and random bits give identical graphs, vertex
operators, and outcomes.  The integer tables are copied out of
:mod:`spinweave.cliffords` into C arrays at import.
"""

from cython.operator cimport dereference as deref, preincrement as inc
from libcpp.algorithm cimport sort
from libcpp.unordered_set cimport unordered_set
from libcpp.vector cimport vector

import numpy as np

from ..errors import ZeroProbabilityError

cdef int MUL[24][24]
cdef int CONJ_AX[24][3]
cdef int CONJ_SG[24][3]
cdef bint ISDIAG[24]
cdef int RED_OFF[25]
cdef int RED_MOVES[200]
cdef int TPAIR[24][24][2][3]
cdef int TAFRESH[24][24][2][3]
cdef int I_IDX, Z_IDX, S_IDX, SDG_IDX, SQXM
cdef int AX_X, AX_Y, AX_Z


def _load_tables():
    from .. import cliffords as cl
    global I_IDX, Z_IDX, S_IDX, SDG_IDX, SQXM, AX_X, AX_Y, AX_Z
    cdef int a, b, e, k, off
    for a in range(24):
        for b in range(24):
            MUL[a][b] = cl.MUL[a, b]
        for k in range(3):
            CONJ_AX[a][k] = cl.CONJ_AXIS[a, k]
            CONJ_SG[a][k] = cl.CONJ_SIGN[a, k]
        ISDIAG[a] = bool(cl.IS_DIAGONAL[a])
    off = 0
    for a in range(24):
        RED_OFF[a] = off
        for m in cl.REDUCE_SEQ[a]:
            RED_MOVES[off] = m
            off += 1
    RED_OFF[24] = off
    for a in range(24):
        for b in range(24):
            for e in range(2):
                for k in range(3):
                    TPAIR[a][b][e][k] = cl.T_PAIR[a, b, e, k]
                    TAFRESH[a][b][e][k] = cl.T_AFRESH[a, b, e, k]
    I_IDX = cl.I_IDX
    Z_IDX = cl.Z_IDX
    S_IDX = cl.S_IDX
    SDG_IDX = cl.SDG_IDX
    SQXM = cl.SQRT_MINUS_IX
    AX_X = cl.AXIS_X
    AX_Y = cl.AXIS_Y
    AX_Z = cl.AXIS_Z


_load_tables()

cdef int _MODE_FORCE = 0
cdef int _MODE_BIT = 1
cdef int _MODE_CALL = 2


cdef class FastGraphKernel:
    cdef vector[unordered_set[int]] adj
    cdef vector[int] vop
    cdef vector[char] alive
    cdef int n_alive
    cdef public long long local_complement_count
    cdef public long long table_fuse_count

    def __cinit__(self):
        self.n_alive = 0
        self.local_complement_count = 0
        self.table_fuse_count = 0

    # -- bookkeeping ----------------------------------------------------

    cdef int _new_vertex(self, int c):
        cdef unordered_set[int] empty
        self.adj.push_back(empty)
        self.vop.push_back(c)
        self.alive.push_back(1)
        self.n_alive += 1
        return <int> self.adj.size() - 1

    def new_vertex(self, vop=0):
        return self._new_vertex(<int> vop)

    cdef inline bint _live(self, int v):
        return 0 <= v < <int> self.adj.size() and self.alive[v]

    cdef _check(self, int v):
        if not self._live(v):
            raise KeyError(f"no live vertex {v}")

    def num_vertices(self):
        return self.n_alive

    def vertices(self):
        cdef int v
        return [v for v in range(<int> self.adj.size()) if self.alive[v]]

    cdef vector[int] _ngb_sorted(self, int v):
        cdef vector[int] out
        cdef unordered_set[int].iterator it = self.adj[v].begin()
        while it != self.adj[v].end():
            out.push_back(deref(it))
            inc(it)
        sort(out.begin(), out.end())
        return out

    def neighbors(self, v):
        self._check(v)
        cdef vector[int] ns = self._ngb_sorted(<int> v)
        return [ns[i] for i in range(<int> ns.size())]

    def degree(self, v):
        self._check(v)
        return <int> self.adj[<int> v].size()

    def vop_of(self, v):
        self._check(v)
        return self.vop[<int> v]

    def has_edge(self, a, b):
        self._check(a)
        self._check(b)
        return self.adj[<int> a].count(<int> b) > 0

    def edge_count(self):
        return self._edge_count()

    cdef long long _edge_count(self):
        cdef long long total = 0
        cdef int v
        for v in range(<int> self.adj.size()):
            if self.alive[v]:
                total += <long long> self.adj[v].size()
        return total // 2

    def edges(self):
        cdef int v, u
        cdef vector[int] ns
        out = []
        for v in range(<int> self.adj.size()):
            if not self.alive[v]:
                continue
            ns = self._ngb_sorted(v)
            for i in range(<int> ns.size()):
                u = ns[i]
                if u > v:
                    out.append((v, u))
        out.sort()
        return out

    cdef void _toggle_edge(self, int a, int b):
        if self.adj[a].count(b):
            self.adj[a].erase(b)
            self.adj[b].erase(a)
        else:
            self.adj[a].insert(b)
            self.adj[b].insert(a)

    cdef void _remove_vertex(self, int v):
        cdef unordered_set[int].iterator it = self.adj[v].begin()
        while it != self.adj[v].end():
            self.adj[deref(it)].erase(v)
            inc(it)
        self.adj[v].clear()
        self.alive[v] = 0
        self.n_alive -= 1

    # -- unitaries -------------------------------------------------------

    def apply_clifford(self, v, c):
        self._check(v)
        self.vop[<int> v] = MUL[<int> c][self.vop[<int> v]]

    cdef void _local_complement(self, int u):
        cdef vector[int] ngb = self._ngb_sorted(u)
        cdef int i, j, n = <int> ngb.size()
        for i in range(n):
            for j in range(i + 1, n):
                self._toggle_edge(ngb[i], ngb[j])
        self.vop[u] = MUL[self.vop[u]][SQXM]
        for i in range(n):
            self.vop[ngb[i]] = MUL[self.vop[ngb[i]]][SDG_IDX]
        self.local_complement_count += 1

    def local_complement(self, u):
        self._check(u)
        self._local_complement(<int> u)

    cdef void _try_reduce(self, int v, int avoid):
        cdef int start = RED_OFF[self.vop[v]]
        cdef int end = RED_OFF[self.vop[v] + 1]
        if start == end:
            return
        cdef bint needs_partner = False
        cdef int k, partner = -1, cand
        cdef unordered_set[int].iterator it
        for k in range(start, end):
            if RED_MOVES[k] == 1:
                needs_partner = True
                break
        if needs_partner:
            it = self.adj[v].begin()
            while it != self.adj[v].end():
                cand = deref(it)
                if cand != avoid and (partner < 0 or cand < partner):
                    partner = cand
                inc(it)
            if partner < 0:
                return
        for k in range(start, end):
            self._local_complement(v if RED_MOVES[k] == 0 else partner)

    cdef _add_cz(self, int a, int b):
        if a == b:
            raise ValueError("controlled-Z requires two distinct vertices")
        self._try_reduce(a, b)
        self._try_reduce(b, a)
        self._try_reduce(a, b)
        cdef int va = self.vop[a]
        cdef int vb = self.vop[b]
        cdef int e = 1 if self.adj[a].count(b) else 0
        cdef int va2, vb2, e2
        if ISDIAG[va] and ISDIAG[vb]:
            self._toggle_edge(a, b)
            return
        if ISDIAG[vb]:
            va2 = TAFRESH[va][vb][e][0]
            vb2 = TAFRESH[va][vb][e][1]
            e2 = TAFRESH[va][vb][e][2]
        elif ISDIAG[va]:
            vb2 = TAFRESH[vb][va][e][0]
            va2 = TAFRESH[vb][va][e][1]
            e2 = TAFRESH[vb][va][e][2]
        else:
            va2 = TPAIR[va][vb][e][0]
            vb2 = TPAIR[va][vb][e][1]
            e2 = TPAIR[va][vb][e][2]
        if va2 < 0:
            raise RuntimeError("fusion table consulted outside its domain")
        self.table_fuse_count += 1
        self.vop[a] = va2
        self.vop[b] = vb2
        if e2 != e:
            self._toggle_edge(a, b)

    def add_cz(self, a, b):
        self._check(a)
        self._check(b)
        self._add_cz(<int> a, <int> b)

    # -- measurement -----------------------------------------------------

    cdef tuple _measure(self, int v, int code, int mode, int bit, object draw):
        cdef int c = self.vop[v]
        cdef int ax = CONJ_AX[c][code]
        cdef int sgn = CONJ_SG[c][code]
        cdef int out, graph_out, i, j, n, u, corr
        cdef vector[int] ngb
        cdef unordered_set[int].iterator it
        if ax == AX_X:
            if self.adj[v].size() == 0:
                out = 0 if sgn > 0 else 1
                if mode == _MODE_FORCE and bit != out:
                    raise ZeroProbabilityError(
                        f"vertex {v} measurement is deterministic; outcome {bit} impossible"
                    )
                self._remove_vertex(v)
                return out, 1.0
            it = self.adj[v].begin()
            u = deref(it)
            inc(it)
            while it != self.adj[v].end():
                if deref(it) < u:
                    u = deref(it)
                inc(it)
            self._local_complement(u)
            c = self.vop[v]
            ax = CONJ_AX[c][code]
            sgn = CONJ_SG[c][code]
        if mode == _MODE_FORCE or mode == _MODE_BIT:
            out = bit
        else:
            if draw is None:
                raise ValueError("random measurement needs a bit source")
            out = int(draw()) & 1
        graph_out = out ^ (1 if sgn < 0 else 0)
        ngb = self._ngb_sorted(v)
        n = <int> ngb.size()
        if ax == AX_Y:
            for i in range(n):
                for j in range(i + 1, n):
                    self._toggle_edge(ngb[i], ngb[j])
            corr = S_IDX if graph_out == 0 else SDG_IDX
            for i in range(n):
                self.vop[ngb[i]] = MUL[self.vop[ngb[i]]][corr]
        else:
            if graph_out == 1:
                for i in range(n):
                    self.vop[ngb[i]] = MUL[self.vop[ngb[i]]][Z_IDX]
        self._remove_vertex(v)
        return out, 0.5

    def measure_pauli(self, v, axis, force=None, draw=None):
        self._check(v)
        ax = str(axis).strip().upper()
        if ax == "X":
            code = AX_X
        elif ax == "Y":
            code = AX_Y
        elif ax == "Z":
            code = AX_Z
        else:
            raise ValueError(f"unknown Pauli axis {axis!r}")
        if force is not None:
            f = int(force)
            if f not in (0, 1):
                raise ValueError("forced outcome must be 0 or 1")
            return self._measure(<int> v, code, _MODE_FORCE, f, None)
        return self._measure(<int> v, code, _MODE_CALL, 0, draw)

    # -- fused growth loop -------------------------------------------------

    def run_branch_trial(self, tip, stack, success, side, fail_out, collect_trace=False):
        cdef unsigned char[::1] suc = np.ascontiguousarray(np.asarray(success), dtype=np.uint8)
        cdef unsigned char[::1] sid = np.ascontiguousarray(np.asarray(side), dtype=np.uint8)
        cdef unsigned char[::1] fal = np.ascontiguousarray(np.asarray(fail_out), dtype=np.uint8)
        cdef int steps = <int> suc.shape[0]
        cdef vector[int] stk
        for x in stack:
            stk.push_back(<int> x)
        cdef int t = <int> tip
        cdef long long delta_sum = 0
        cdef long long reseeds = 0
        cdef int i, u1, u2, w
        cdef bint trace_on = bool(collect_trace)
        trace = []
        for i in range(steps):
            if suc[i]:
                u1 = self._new_vertex(I_IDX)
                u2 = self._new_vertex(I_IDX)
                self._add_cz(u1, u2)
                self.vop[u1] = MUL[SDG_IDX if sid[i] else S_IDX][self.vop[u1]]
                w = self._new_vertex(I_IDX)
                self._add_cz(w, t)
                self._add_cz(w, u1)
                self._measure(w, AX_X, _MODE_FORCE, 1, None)
                stk.push_back(u1)
                stk.push_back(t)
                t = u2
                delta_sum += 2
            else:
                self._measure(t, AX_Z, _MODE_BIT, fal[i], None)
                delta_sum -= 1
                if stk.size() > 0:
                    t = stk.back()
                    stk.pop_back()
                else:
                    t = self._new_vertex(I_IDX)
                    u2 = self._new_vertex(I_IDX)
                    self._add_cz(t, u2)
                    stk.push_back(t)
                    t = u2
                    reseeds += 1
            if trace_on:
                trace.append((self.n_alive, int(self._edge_count())))
        del stack[:]
        for i in range(<int> stk.size()):
            stack.append(stk[i])
        return t, int(delta_sum), int(reseeds), trace
