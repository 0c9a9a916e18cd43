"""Simulator for growing entangled graph states over optically linked spin qubits."""

__version__ = "0.1.0"

from .errors import ScenarioError, SizeLimitError, ZeroProbabilityError

__all__ = [
    "ScenarioError",
    "SizeLimitError",
    "ZeroProbabilityError",
    "__version__",
]
