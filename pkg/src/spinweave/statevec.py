"""Dense state-vector backend.

This module is the exact oracle the rest of the package is verified
against.  States are complex128 vectors indexed little-endian: qubit 0
is the least significant bit of the amplitude index, so the leftmost
label of a written ket such as |abc> is the highest-significance bit
(qubit 2 of 3).

Pure states are capped at 20 qubits and density matrices at 10; both
limits exist to keep every oracle check cheap and exact.

All operations are functional: they return new ``PureState`` or
``DensityState`` instances and never mutate their inputs, so states can
be shared freely across threads or trial workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import SizeLimitError, ZeroProbabilityError

PURE_QUBIT_LIMIT = 20
DENSITY_QUBIT_LIMIT = 10

NORM_ATOL = 1e-12
UNITARY_ATOL = 1e-10
ZERO_PROB_ATOL = 1e-12

_SQ2 = 1.0 / math.sqrt(2.0)

# Common single-qubit matrices, used both by gates and by tests.
ID2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2
S_GATE = np.array([[1, 0], [0, 1j]], dtype=complex)
S_DAGGER = np.array([[1, 0], [0, -1j]], dtype=complex)


def phase_gate(phi: float) -> np.ndarray:
    """diag(1, e^{i phi})."""
    return np.array([[1, 0], [0, np.exp(1j * phi)]], dtype=complex)


class PureState:
    """Normalized n-qubit state vector, immutable after construction."""

    __slots__ = ("num_qubits", "amplitudes")

    def __init__(self, amplitudes: np.ndarray, *, _trusted: bool = False):
        amps = np.asarray(amplitudes, dtype=complex).reshape(-1)
        n = int(amps.size).bit_length() - 1
        if amps.size != (1 << n):
            raise ValueError(f"amplitude count {amps.size} is not a power of two")
        if n > PURE_QUBIT_LIMIT:
            raise SizeLimitError(f"{n} qubits exceeds the pure-state limit of {PURE_QUBIT_LIMIT}")
        if not _trusted:
            norm2 = float(np.vdot(amps, amps).real)
            if abs(norm2 - 1.0) > 1e-9:
                raise ValueError(f"state norm^2 = {norm2!r}, expected 1")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "num_qubits", n)
        object.__setattr__(self, "amplitudes", amps)

    def __setattr__(self, name, value):
        raise AttributeError("PureState is immutable")

    def norm_error(self) -> float:
        """|norm^2 - 1|; stays below 1e-12 through any op sequence here."""
        return abs(float(np.vdot(self.amplitudes, self.amplitudes).real) - 1.0)

    def __repr__(self):
        return f"PureState(num_qubits={self.num_qubits})"


class DensityState:
    """Density matrix on up to DENSITY_QUBIT_LIMIT qubits."""

    __slots__ = ("num_qubits", "matrix")

    def __init__(self, matrix: np.ndarray, *, _trusted: bool = False):
        mat = np.asarray(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("density matrix must be square")
        n = int(mat.shape[0]).bit_length() - 1
        if mat.shape[0] != (1 << n):
            raise ValueError("density matrix dimension is not a power of two")
        if n > DENSITY_QUBIT_LIMIT:
            raise SizeLimitError(f"{n} qubits exceeds the density limit of {DENSITY_QUBIT_LIMIT}")
        if not _trusted:
            if not np.allclose(mat, mat.conj().T, atol=1e-10):
                raise ValueError("density matrix is not Hermitian")
            tr = float(np.trace(mat).real)
            if abs(tr - 1.0) > 1e-9:
                raise ValueError(f"density trace = {tr!r}, expected 1")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "num_qubits", n)
        object.__setattr__(self, "matrix", mat)

    def __setattr__(self, name, value):
        raise AttributeError("DensityState is immutable")

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.matrix)[0])

    def __repr__(self):
        return f"DensityState(num_qubits={self.num_qubits})"


@dataclass(frozen=True)
class MeasurementOutcome:
    """One sampled (or forced) measurement branch."""

    label: int
    probability: float
    post_state: PureState


def init_plus(n: int) -> PureState:
    """|+>^n, the blank slate every graph state starts from."""
    if n < 0:
        raise ValueError("qubit count must be non-negative")
    if n > PURE_QUBIT_LIMIT:
        raise SizeLimitError(f"{n} qubits exceeds the pure-state limit of {PURE_QUBIT_LIMIT}")
    amps = np.full(1 << n, 2.0 ** (-n / 2.0), dtype=complex)
    return PureState(amps, _trusted=True)


def basis_state(bits: str) -> PureState:
    """Computational basis ket from a bit string written MSB-first.

    ``basis_state("10")`` is the two-qubit ket |10>: qubit 1 set, qubit 0
    clear.
    """
    if bits and any(c not in "01" for c in bits):
        raise ValueError(f"bad bit string {bits!r}")
    n = len(bits)
    amps = np.zeros(1 << n, dtype=complex)
    amps[int(bits, 2) if bits else 0] = 1.0
    return PureState(amps, _trusted=True)


_SINGLE_QUBIT_LABELS = {
    "0": np.array([1, 0], dtype=complex),
    "1": np.array([0, 1], dtype=complex),
    "+": np.array([_SQ2, _SQ2], dtype=complex),
    "-": np.array([_SQ2, -_SQ2], dtype=complex),
    "i": np.array([_SQ2, 1j * _SQ2], dtype=complex),
    "-i": np.array([_SQ2, -1j * _SQ2], dtype=complex),
}


def qubit_state(label: str) -> PureState:
    """Single-qubit state from one of the labels 0, 1, +, -, i, -i."""
    try:
        return PureState(_SINGLE_QUBIT_LABELS[label.strip()], _trusted=True)
    except KeyError:
        raise ValueError(f"unknown single-qubit label {label!r}") from None


def tensor(*states: PureState) -> PureState:
    """Tensor product; the first argument holds the highest qubit indices."""
    amps = np.array([1.0 + 0j])
    total = 0
    for s in states:
        total += s.num_qubits
        amps = np.kron(amps, s.amplitudes)
    if total > PURE_QUBIT_LIMIT:
        raise SizeLimitError(f"{total} qubits exceeds the pure-state limit")
    return PureState(amps, _trusted=True)


def _check_qubit(state: PureState, q: int):
    if not (0 <= q < state.num_qubits):
        raise IndexError(f"qubit {q} out of range for {state.num_qubits}-qubit state")


def apply_1q(state: PureState, q: int, u: np.ndarray) -> PureState:
    """Apply a 2x2 unitary to qubit q."""
    _check_qubit(state, q)
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2):
        raise ValueError("single-qubit operator must be 2x2")
    if not np.allclose(u.conj().T @ u, ID2, atol=UNITARY_ATOL):
        raise ValueError("operator is not unitary within 1e-10")
    n = state.num_qubits
    # qubit q toggles blocks of size 2^q
    arr = state.amplitudes.reshape(1 << (n - 1 - q), 2, 1 << q)
    out = np.einsum("ab,xbz->xaz", u, arr).reshape(-1)
    return PureState(out, _trusted=True)


def apply_cz(state: PureState, a: int, b: int) -> PureState:
    """Controlled-Z between qubits a and b: -1 on the |11> component."""
    _check_qubit(state, a)
    _check_qubit(state, b)
    if a == b:
        raise ValueError("CZ requires two distinct qubits")
    idx = np.arange(state.amplitudes.size)
    mask = ((idx >> a) & 1) & ((idx >> b) & 1)
    out = state.amplitudes.copy()
    out[mask == 1] *= -1.0
    return PureState(out, _trusted=True)


def _branch_vectors(state: PureState, q: int, basis) -> tuple[np.ndarray, np.ndarray]:
    """Unnormalized post-measurement vectors (outcome 0, outcome 1).

    basis is "Z", "Y", "X", or an xy-plane angle phi in radians.  The
    xy-plane outcome states are (|0> + e^{i phi}|1>)/sqrt2 for outcome 0
    and (|0> - e^{i phi}|1>)/sqrt2 for outcome 1; "X" is phi = 0 and "Y"
    is phi = pi/2.  "Z" projects onto |0>, |1> directly.  The measured
    qubit is removed; qubit indices above q shift down by one.
    """
    n = state.num_qubits
    arr = state.amplitudes.reshape(1 << (n - 1 - q), 2, 1 << q)
    a0 = arr[:, 0, :].reshape(-1)
    a1 = arr[:, 1, :].reshape(-1)
    if isinstance(basis, str):
        key = basis.strip().upper()
        if key == "Z":
            return a0.copy(), a1.copy()
        if key == "X":
            phi = 0.0
        elif key == "Y":
            phi = math.pi / 2.0
        else:
            raise ValueError(f"unknown measurement basis {basis!r}")
    else:
        phi = float(basis)
    w = np.exp(-1j * phi)
    v0 = (a0 + w * a1) * _SQ2
    v1 = (a0 - w * a1) * _SQ2
    return v0, v1


def measure_probabilities(state: PureState, q: int, basis) -> tuple[float, float]:
    """Both outcome probabilities; they sum to 1 within 1e-12."""
    _check_qubit(state, q)
    v0, v1 = _branch_vectors(state, q, basis)
    p0 = float(np.vdot(v0, v0).real)
    p1 = float(np.vdot(v1, v1).real)
    return p0, p1


def measure_basis(
    state: PureState,
    q: int,
    basis,
    rng: np.random.Generator | None = None,
    force: int | None = None,
) -> MeasurementOutcome:
    """Measure qubit q, remove it, and renormalize the survivor.

    Outcome selection draws one uniform number from ``rng``; passing
    ``force`` post-selects that branch instead (no rng draw) and raises
    ``ZeroProbabilityError`` if the branch has no weight.
    """
    _check_qubit(state, q)
    v0, v1 = _branch_vectors(state, q, basis)
    p0 = float(np.vdot(v0, v0).real)
    p1 = float(np.vdot(v1, v1).real)
    if force is not None:
        if force not in (0, 1):
            raise ValueError("forced outcome must be 0 or 1")
        label = int(force)
    else:
        if rng is None:
            raise ValueError("measure_basis needs an rng unless the outcome is forced")
        label = 0 if rng.random() < p0 else 1
    prob = p0 if label == 0 else p1
    if prob < ZERO_PROB_ATOL:
        raise ZeroProbabilityError(
            f"outcome {label} on qubit {q} has probability {prob:.3e}"
        )
    vec = (v0 if label == 0 else v1) / math.sqrt(prob)
    return MeasurementOutcome(label, prob, PureState(vec, _trusted=True))


def states_equal_up_to_global_phase(a: PureState, b: PureState, tol: float = 1e-10) -> bool:
    """True when |<a|b>| = 1 within tol (states assumed normalized)."""
    if a.num_qubits != b.num_qubits:
        return False
    return abs(1.0 - abs(complex(np.vdot(a.amplitudes, b.amplitudes)))) <= tol


def global_phase_between(a: PureState, b: PureState) -> complex:
    """Phase z with b ~ z * a; meaningful when the overlap is near 1."""
    ov = complex(np.vdot(a.amplitudes, b.amplitudes))
    if abs(ov) < 1e-12:
        raise ValueError("states are orthogonal; no relative phase")
    return ov / abs(ov)


def to_density(state: PureState) -> DensityState:
    if state.num_qubits > DENSITY_QUBIT_LIMIT:
        raise SizeLimitError(
            f"{state.num_qubits} qubits exceeds the density limit of {DENSITY_QUBIT_LIMIT}"
        )
    v = state.amplitudes
    return DensityState(np.outer(v, v.conj()), _trusted=True)


def mix(pairs: list[tuple[float, DensityState]]) -> DensityState:
    """Convex mixture; probabilities must sum to 1 within 1e-12."""
    if not pairs:
        raise ValueError("cannot mix an empty ensemble")
    total = sum(p for p, _ in pairs)
    if abs(total - 1.0) > 1e-12:
        raise ValueError(f"mixture weights sum to {total!r}, expected 1")
    if any(p < -1e-15 for p, _ in pairs):
        raise ValueError("mixture weights must be non-negative")
    n = pairs[0][1].num_qubits
    if any(rho.num_qubits != n for _, rho in pairs):
        raise ValueError("mixture members must share a qubit count")
    acc = np.zeros_like(pairs[0][1].matrix)
    for p, rho in pairs:
        acc = acc + p * rho.matrix
    return DensityState(acc, _trusted=True)


def fidelity(rho: DensityState, psi: PureState) -> float:
    """<psi| rho |psi>, real and clipped into [0, 1]."""
    if rho.num_qubits != psi.num_qubits:
        raise ValueError("state sizes differ")
    v = psi.amplitudes
    val = float(np.real(np.vdot(v, rho.matrix @ v)))
    return min(1.0, max(0.0, val))


def reduced_density(state: PureState | DensityState, keep: list[int]) -> DensityState:
    """Partial trace onto the listed qubits.

    Kept qubits are renumbered 0..m-1 in ascending original order.
    """
    keep = sorted(set(int(q) for q in keep))
    n = state.num_qubits
    m = len(keep)
    if any(not (0 <= q < n) for q in keep):
        raise IndexError("kept qubit out of range")
    if m > DENSITY_QUBIT_LIMIT:
        raise SizeLimitError(f"{m} kept qubits exceeds the density limit")
    if isinstance(state, PureState):
        t = state.amplitudes.reshape([2] * n)
        front = [n - 1 - k for k in sorted(keep, reverse=True)]
        mat = np.moveaxis(t, front, range(m)).reshape(1 << m, -1)
        return DensityState(mat @ mat.conj().T, _trusted=True)
    drop = [q for q in range(n) if q not in keep]
    t = state.matrix.reshape([2] * (2 * n))
    # Ascending qubit order keeps earlier (larger-index) removals from
    # shifting the axis positions of the qubits still to be traced.
    for q in sorted(drop):
        ax = n - 1 - q
        half = t.ndim // 2
        t = np.trace(t, axis1=ax, axis2=half + ax)
    dim = 1 << m
    return DensityState(t.reshape(dim, dim), _trusted=True)


def partial_transpose(rho: DensityState, qubits: list[int]) -> np.ndarray:
    """Transpose the listed subsystem; returns a plain matrix."""
    n = rho.num_qubits
    qs = sorted(set(int(q) for q in qubits))
    if any(not (0 <= q < n) for q in qs):
        raise IndexError("qubit out of range")
    t = rho.matrix.reshape([2] * (2 * n))
    for q in qs:
        ax = n - 1 - q
        t = np.swapaxes(t, ax, n + ax)
    return t.reshape(1 << n, 1 << n)


def min_ppt_eigenvalue(rho: DensityState, qubits: list[int]) -> float:
    """Smallest eigenvalue after partially transposing the given qubits.

    For two-qubit states a value >= -1e-10 certifies separability.
    """
    return float(np.linalg.eigvalsh(partial_transpose(rho, qubits))[0])


def schmidt_coefficients(state: PureState, part: list[int]) -> np.ndarray:
    """Schmidt coefficients (descending) across the cut part | rest."""
    rho = reduced_density(state, part)
    evals = np.clip(np.linalg.eigvalsh(rho.matrix), 0.0, None)
    return np.sqrt(evals)[::-1]


def dump_state_json(state: PureState) -> str:
    """Serialize as {"num_qubits": n, "amplitudes": [[re, im], ...]}."""
    payload = {
        "num_qubits": state.num_qubits,
        "amplitudes": [[float(z.real), float(z.imag)] for z in state.amplitudes],
    }
    return json.dumps(payload)


def load_state_json(text: str) -> PureState:
    payload = json.loads(text)
    amps = np.array([complex(re, im) for re, im in payload["amplitudes"]])
    state = PureState(amps)
    if state.num_qubits != payload["num_qubits"]:
        raise ValueError("num_qubits field disagrees with amplitude count")
    return state
