"""Pattern and circuit descriptions for measurement-driven computation.

A computation is a :class:`GraphBlueprint` (vertices, CZ edges, designated
input and output vertices) plus a :class:`MeasurementPattern` (ordered
single-qubit measurements with classical angle feed-forward).  The frame
index sets record which measurement outcomes flip the X and Z byproducts
on each wire; evaluating them on actual outcomes yields a
:class:`PauliFrame`.

File formats are deliberately small: a pattern file is a JSON list of
``{"vertex": v, "basis": "Z"|"Y"|{"xy": angle}, "adapt": [..]}`` objects,
a circuit file a JSON list of ``["rz", wire, angle]``, ``["h", wire]`` and
``["cz", a, b]`` entries.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass


@dataclass(frozen=True)
class GraphBlueprint:
    """Entanglement layout: every edge is one CZ bond."""

    num_vertices: int
    edges: tuple[tuple[int, int], ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        n = self.num_vertices
        for a, b in self.edges:
            if a == b:
                raise ValueError("self-loop edge")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a},{b}) out of range")
        for group in (self.inputs, self.outputs):
            if len(set(group)) != len(group):
                raise ValueError("duplicate wire vertex")
            if any(not 0 <= v < n for v in group):
                raise ValueError("wire vertex out of range")
        if len(self.inputs) != len(self.outputs):
            raise ValueError("inputs and outputs must pair up per wire")

    @property
    def num_wires(self) -> int:
        return len(self.inputs)


@dataclass(frozen=True)
class PatternEntry:
    """One measurement: Pauli Z/Y, or an xy-plane angle with feed-forward.

    For an angle entry the measured angle is negated when the XOR of the
    outcomes listed in ``adapt`` is 1.
    """

    vertex: int
    basis: str | float
    adapt: tuple[int, ...] = ()

    def __post_init__(self):
        if isinstance(self.basis, str):
            if self.basis not in ("Z", "Y"):
                raise ValueError(f"pauli basis must be Z or Y, got {self.basis!r}")
            if self.adapt:
                raise ValueError("pauli measurements take no feed-forward")
        else:
            if not math.isfinite(float(self.basis)):
                raise ValueError("measurement angle must be finite")
        object.__setattr__(self, "adapt", tuple(int(i) for i in self.adapt))

    @property
    def is_pauli(self) -> bool:
        return isinstance(self.basis, str)


@dataclass(frozen=True)
class MeasurementPattern:
    """Ordered measurements plus the per-wire byproduct index sets."""

    entries: tuple[PatternEntry, ...]
    frame_x: tuple[tuple[int, ...], ...] = ()
    frame_z: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        seen = set()
        for i, e in enumerate(self.entries):
            if e.vertex in seen:
                raise ValueError(f"vertex {e.vertex} measured twice")
            seen.add(e.vertex)
            if any(j >= i or j < 0 for j in e.adapt):
                raise ValueError(
                    f"entry {i} adapts on non-earlier measurement")
        if len(self.frame_x) != len(self.frame_z):
            raise ValueError("frame index sets must pair up per wire")
        total = len(self.entries)
        for group in self.frame_x + self.frame_z:
            if any(not 0 <= j < total for j in group):
                raise ValueError("frame references unknown measurement")

    @property
    def num_wires(self) -> int:
        return len(self.frame_x)

    def measured_vertices(self) -> set[int]:
        return {e.vertex for e in self.entries}


@dataclass
class PauliFrame:
    """Per-wire byproduct record: physical = X^x Z^z (ideal)."""

    x: list[int]
    z: list[int]

    def __post_init__(self):
        if len(self.x) != len(self.z):
            raise ValueError("frame bit lists must have equal length")
        self.x = [int(b) & 1 for b in self.x]
        self.z = [int(b) & 1 for b in self.z]

    @classmethod
    def identity(cls, wires: int) -> "PauliFrame":
        return cls([0] * wires, [0] * wires)

    @classmethod
    def from_outcomes(cls, pattern: MeasurementPattern,
                      outcomes: tuple[int, ...]) -> "PauliFrame":
        def flip(idxs):
            bit = 0
            for j in idxs:
                bit ^= outcomes[j]
            return bit
        return cls([flip(g) for g in pattern.frame_x],
                   [flip(g) for g in pattern.frame_z])


@dataclass(frozen=True)
class CircuitSpec:
    """Gate list over ``num_wires`` logical wires.

    Gates are tuples: ``("rz", wire, angle)``, ``("h", wire)`` and
    ``("cz", a, b)``.
    """

    num_wires: int
    gates: tuple[tuple, ...] = ()

    def __post_init__(self):
        if self.num_wires < 1:
            raise ValueError("need at least one wire")
        object.__setattr__(self, "gates", tuple(tuple(g) for g in self.gates))
        for g in self.gates:
            kind = g[0]
            if kind == "rz":
                _, w, angle = g
                self._check_wire(w)
                if not math.isfinite(float(angle)):
                    raise ValueError("rz angle must be finite")
            elif kind == "h":
                _, w = g
                self._check_wire(w)
            elif kind == "cz":
                _, a, b = g
                self._check_wire(a)
                self._check_wire(b)
                if a == b:
                    raise ValueError("cz needs two distinct wires")
            else:
                raise ValueError(f"unknown gate {kind!r}")

    def _check_wire(self, w):
        if not 0 <= int(w) < self.num_wires:
            raise ValueError(f"wire {w} out of range")


# -- JSON forms -------------------------------------------------------------

def entry_to_obj(e: PatternEntry) -> dict:
    basis = e.basis if e.is_pauli else {"xy": float(e.basis)}
    return {"vertex": e.vertex, "basis": basis, "adapt": list(e.adapt)}


def entry_from_obj(obj: dict) -> PatternEntry:
    basis = obj["basis"]
    if isinstance(basis, dict):
        basis = float(basis["xy"])
    return PatternEntry(int(obj["vertex"]), basis,
                        tuple(obj.get("adapt", ())))


def entries_to_json(pattern: MeasurementPattern) -> str:
    return json.dumps([entry_to_obj(e) for e in pattern.entries], indent=1)


def entries_from_json(text: str) -> tuple[PatternEntry, ...]:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("pattern file must hold a JSON list")
    return tuple(entry_from_obj(o) for o in data)


def circuit_to_json(spec: CircuitSpec) -> str:
    return json.dumps([list(g) for g in spec.gates], indent=1)


def circuit_from_json(text: str, num_wires: int | None = None) -> CircuitSpec:
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("circuit file must hold a JSON list")
    gates = []
    top = 0
    for g in data:
        if not isinstance(g, list) or not g:
            raise ValueError(f"bad gate entry {g!r}")
        kind = g[0]
        if kind == "rz":
            gates.append(("rz", int(g[1]), float(g[2])))
            top = max(top, int(g[1]))
        elif kind == "h":
            gates.append(("h", int(g[1])))
            top = max(top, int(g[1]))
        elif kind == "cz":
            gates.append(("cz", int(g[1]), int(g[2])))
            top = max(top, int(g[1]), int(g[2]))
        else:
            raise ValueError(f"unknown gate {kind!r}")
    wires = num_wires if num_wires is not None else top + 1
    return CircuitSpec(wires, tuple(gates))


def chain_blueprint_for_entries(entries: tuple[PatternEntry, ...]) -> GraphBlueprint:
    """Linear-chain reading of a bare pattern file: one wire, one output.

    Vertices 0..k form a path; the single unmeasured vertex is the
    output and must be the chain's far end.
    """
    if not entries:
        raise ValueError("empty pattern")
    measured = [e.vertex for e in entries]
    n = max(measured) + 2
    leftover = set(range(n)) - set(measured)
    if leftover != {n - 1} or len(measured) != len(set(measured)):
        raise ValueError("entries do not cover a chain with one free end")
    edges = tuple((i, i + 1) for i in range(n - 1))
    return GraphBlueprint(n, edges, inputs=(0,), outputs=(n - 1,))
