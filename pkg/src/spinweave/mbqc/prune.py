"""Carve target graphs out of rectangular cluster states.

Unwanted cluster vertices are measured in Z (cut the vertex out) or Y
(cut it out while linking its neighbourhood).  The planner below does an
exhaustive search over Z/Y assignments, cheapest-in-Y first, simulating
each candidate on the tracked graph backend; outcomes only move
single-qubit corrections around, so the surviving adjacency is a pure
function of the assignment.
"""

from __future__ import annotations

from itertools import combinations
from typing import Iterable, Mapping

from ..graph.register import GraphRegister, MeasurementRecord
from .patterns import GraphBlueprint

MAX_CLUSTER_QUBITS = 20


def cluster_ids(rows: int, cols: int) -> list[int]:
    return list(range(rows * cols))


def cluster_edges(rows: int, cols: int) -> list[tuple[int, int]]:
    """Grid bonds; vertex id is row*cols + col."""
    edges = []
    for r in range(rows):
        for c in range(cols):
            v = r * cols + c
            if c + 1 < cols:
                edges.append((v, v + 1))
            if r + 1 < rows:
                edges.append((v, v + cols))
    return edges


def cluster_blueprint(rows: int, cols: int) -> GraphBlueprint:
    n = rows * cols
    return GraphBlueprint(n, tuple(cluster_edges(rows, cols)), (), ())


def build_cluster(rows: int, cols: int,
                  backend: str | None = None) -> tuple[GraphRegister, list[int]]:
    """Fresh register holding the rows x cols cluster; returns vertex ids."""
    _check_dims(rows, cols)
    reg = GraphRegister(backend)
    ids = [reg.new_vertex() for _ in range(rows * cols)]
    for a, b in cluster_edges(rows, cols):
        reg.add_cz(ids[a], ids[b])
    return reg, ids


def _check_dims(rows: int, cols: int):
    if rows < 1 or cols < 1:
        raise ValueError("cluster dimensions must be positive")
    if rows * cols > MAX_CLUSTER_QUBITS:
        raise ValueError(
            f"{rows}x{cols} cluster exceeds {MAX_CLUSTER_QUBITS} qubits")


def _normalize_target(rows: int, cols: int,
                      target: Mapping[int, Iterable[int]]) -> dict[int, set[int]]:
    n = rows * cols
    adj = {int(v): {int(u) for u in nbrs} for v, nbrs in target.items()}
    for v, nbrs in adj.items():
        if not 0 <= v < n:
            raise ValueError(f"target vertex {v} outside the cluster")
        if v in nbrs:
            raise ValueError("target adjacency has a self-loop")
        for u in nbrs:
            if u not in adj or v not in adj[u]:
                raise ValueError("target adjacency is not symmetric over its keys")
    return adj


def apply_prelude(register: GraphRegister, prelude, rng=None,
                  force: int | None = None) -> list[MeasurementRecord]:
    """Measure the listed (vertex, "Z"|"Y") pairs through the graph kernel."""
    records = []
    for v, basis in prelude:
        records.append(register.measure_pauli(v, basis, rng=rng, force=force))
    return records


def _survivor_adjacency(rows: int, cols: int, assignment) -> dict[int, set[int]]:
    reg, ids = build_cluster(rows, cols, backend="pure")
    for v, basis in assignment:
        reg.measure_pauli(ids[v], basis, force=0)
    back = {vid: k for k, vid in enumerate(ids)}
    return {back[v]: {back[u] for u in reg.neighbors(v)} for v in reg.vertices()}


def prune_cluster(rows: int, cols: int,
                  target: Mapping[int, Iterable[int]]) -> list[tuple[int, str]]:
    """Pauli prelude turning the cluster into ``target`` up to local Cliffords.

    ``target`` maps kept vertex ids to their wanted neighbours; every
    other cluster vertex is measured out.  Assignments are tried in
    order of increasing Y count and the first whose surviving adjacency
    matches exactly is returned; an unreachable target raises.
    """
    _check_dims(rows, cols)
    adj = _normalize_target(rows, cols, target)
    removed = sorted(set(cluster_ids(rows, cols)) - set(adj))
    for y_count in range(len(removed) + 1):
        for ys in combinations(removed, y_count):
            y_set = set(ys)
            assignment = [(v, "Y" if v in y_set else "Z") for v in removed]
            if _survivor_adjacency(rows, cols, assignment) == adj:
                return assignment
    raise ValueError("target adjacency is not reachable by Z/Y pruning")
