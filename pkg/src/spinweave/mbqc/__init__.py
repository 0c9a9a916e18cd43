"""Measurement-based computation: compile, prune, execute, correct."""

from .compiler import (
    HADAMARD,
    MAX_VERTICES,
    MAX_WIRES,
    circuit_unitary,
    compile_circuit,
    compile_rotation,
    hop_angles_for,
    hop_chain_pattern,
    hop_unitary,
)
from .patterns import (
    CircuitSpec,
    GraphBlueprint,
    MeasurementPattern,
    PatternEntry,
    PauliFrame,
    chain_blueprint_for_entries,
    circuit_from_json,
    circuit_to_json,
    entries_from_json,
    entries_to_json,
)
from .prune import apply_prelude, build_cluster, cluster_edges, prune_cluster
from .runner import RunResult, apply_frame, hop_step, run_pattern

__all__ = [
    "HADAMARD",
    "MAX_VERTICES",
    "MAX_WIRES",
    "CircuitSpec",
    "GraphBlueprint",
    "MeasurementPattern",
    "PatternEntry",
    "PauliFrame",
    "RunResult",
    "apply_frame",
    "apply_prelude",
    "build_cluster",
    "chain_blueprint_for_entries",
    "circuit_from_json",
    "circuit_to_json",
    "circuit_unitary",
    "cluster_edges",
    "compile_circuit",
    "compile_rotation",
    "entries_from_json",
    "entries_to_json",
    "hop_angles_for",
    "hop_chain_pattern",
    "hop_step",
    "hop_unitary",
    "prune_cluster",
    "run_pattern",
]
