"""Single-qubit Clifford algebra mod global phase: 24 elements, integer tables.

Every element is stored as a canonical 2x2 matrix whose first nonzero
entry (row-major) is real and positive.  The tables below reduce all
group work elsewhere in the package to integer lookups:

- ``MUL[a][b]``: index of element a @ b
- ``ADJ[a]``: index of the adjoint
- ``CONJ_AXIS``/``CONJ_SIGN``: c^dag sigma c = sign * sigma' per Pauli axis
- ``IS_DIAGONAL``: the four elements commuting with Z mod phase
- ``LEFT_PAULI``/``COSET_REP``: factorization c = P @ r with P a Pauli
- ``REDUCE_SEQ``: shortest move word turning a vertex operator diagonal
  by right-multiplying SQRT_MINUS_IX (move 0) or SDG (move 1)
- ``T_PAIR``/``T_AFRESH``: rewrite tables for a controlled-Z hitting
  vertices whose operators could not be reduced to diagonal form

Everything is constructed numerically at import and cross-checked by
assertions, so a bad edit fails fast rather than corrupting states.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

_SQ2 = 1.0 / math.sqrt(2.0)

_I = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) * _SQ2
_S = np.array([[1, 0], [0, 1j]], dtype=complex)

AXIS_X, AXIS_Y, AXIS_Z = 0, 1, 2
_PAULIS = (_X, _Y, _Z)


def _canonical(m: np.ndarray) -> np.ndarray:
    flat = m.reshape(-1)
    for z in flat:
        if abs(z) > 0.25:
            return m * (abs(z) / z)
    raise ValueError("zero matrix has no canonical form")


def _key(m: np.ndarray) -> tuple:
    c = np.round(_canonical(m), 9) + 0.0  # +0.0 folds -0.0 into 0.0
    return tuple(c.reshape(-1).real.tolist()) + tuple(c.reshape(-1).imag.tolist())


def _build_group() -> list[np.ndarray]:
    mats = [_I.copy()]
    seen = {_key(_I): 0}
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for g in (_H, _S):
            m = _canonical(mats[i] @ g)
            k = _key(m)
            if k not in seen:
                seen[k] = len(mats)
                mats.append(m)
                queue.append(len(mats) - 1)
    return mats


MATS = _build_group()
SIZE = len(MATS)
assert SIZE == 24, f"Clifford closure produced {SIZE} elements"

_INDEX = {_key(m): i for i, m in enumerate(MATS)}


def index_of(matrix: np.ndarray) -> int:
    """Index of an arbitrary single-qubit Clifford, phase ignored."""
    try:
        return _INDEX[_key(np.asarray(matrix, dtype=complex))]
    except KeyError:
        raise ValueError("matrix is not a single-qubit Clifford") from None


I_IDX = 0
X_IDX = index_of(_X)
Y_IDX = index_of(_Y)
Z_IDX = index_of(_Z)
H_IDX = index_of(_H)
S_IDX = index_of(_S)
SDG_IDX = index_of(_S.conj().T)
# principal square roots of -iX and +iX (pi/2 rotations about x)
SQRT_MINUS_IX = index_of((_I - 1j * _X) * _SQ2)
SQRT_PLUS_IX = index_of((_I + 1j * _X) * _SQ2)
assert I_IDX == 0

# pi/2 rotations about z collapse onto S and SDG mod phase
assert index_of((_I - 1j * _Z) * _SQ2) == S_IDX
assert index_of((_I + 1j * _Z) * _SQ2) == SDG_IDX

MUL = np.empty((SIZE, SIZE), dtype=np.int8)
for a in range(SIZE):
    for b in range(SIZE):
        MUL[a, b] = _INDEX[_key(MATS[a] @ MATS[b])]

ADJ = np.empty(SIZE, dtype=np.int8)
for a in range(SIZE):
    ADJ[a] = _INDEX[_key(MATS[a].conj().T)]

CONJ_AXIS = np.empty((SIZE, 3), dtype=np.int8)
CONJ_SIGN = np.empty((SIZE, 3), dtype=np.int8)
for a in range(SIZE):
    cdag = MATS[a].conj().T
    for ax in range(3):
        m = cdag @ _PAULIS[ax] @ MATS[a]
        for ax2 in range(3):
            if np.allclose(m, _PAULIS[ax2], atol=1e-9):
                CONJ_AXIS[a, ax], CONJ_SIGN[a, ax] = ax2, 1
                break
            if np.allclose(m, -_PAULIS[ax2], atol=1e-9):
                CONJ_AXIS[a, ax], CONJ_SIGN[a, ax] = ax2, -1
                break
        else:
            raise AssertionError("conjugated Pauli escaped the Pauli set")

IS_DIAGONAL = np.array(
    [abs(m[0, 1]) < 1e-9 and abs(m[1, 0]) < 1e-9 for m in MATS], dtype=bool
)
assert int(IS_DIAGONAL.sum()) == 4

_PAULI_IDXS = (I_IDX, X_IDX, Y_IDX, Z_IDX)

# Partition into left cosets of the Pauli quotient; rep = smallest index.
COSET_REP = np.full(SIZE, -1, dtype=np.int8)
LEFT_PAULI = np.full(SIZE, -1, dtype=np.int8)
for c in range(SIZE):
    if COSET_REP[c] >= 0:
        continue
    members = [int(MUL[p, c]) for p in _PAULI_IDXS]
    rep = min(members)
    for code, p in enumerate(_PAULI_IDXS):
        m = int(MUL[p, rep])
        COSET_REP[m] = rep
        LEFT_PAULI[m] = code
assert all(
    MUL[_PAULI_IDXS[LEFT_PAULI[c]], COSET_REP[c]] == c for c in range(SIZE)
)


def _build_reduce_words() -> tuple[tuple[int, ...], ...]:
    """Shortest words over {0: mult SQRT_MINUS_IX, 1: mult SDG} to a diagonal."""
    gens = (SQRT_MINUS_IX, SDG_IDX)
    words: list[tuple[int, ...] | None] = [None] * SIZE
    queue: deque[int] = deque()
    for c in range(SIZE):
        if IS_DIAGONAL[c]:
            words[c] = ()
            queue.append(c)
    # BFS backwards: predecessor c of d via move m satisfies MUL[c][gen] == d
    while queue:
        d = queue.popleft()
        for m, g in enumerate(gens):
            for c in range(SIZE):
                if words[c] is None and MUL[c, g] == d:
                    words[c] = (m,) + words[d]
                    queue.append(c)
    assert all(w is not None for w in words)
    return tuple(words)  # type: ignore[arg-type]


REDUCE_SEQ = _build_reduce_words()
assert max(len(w) for w in REDUCE_SEQ) <= 5

_CZM = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
_PLUS = np.array([_SQ2, _SQ2], dtype=complex)


def _build_pair_table() -> np.ndarray:
    """CZ rewrite when both endpoints see no third vertex.

    State family: (c_a x c_b) CZ^e |++>, qubit a the high bit.  The table
    maps (c_a, c_b, e) before a physical CZ to a member of the same
    family afterwards.
    """
    reps: dict[tuple, tuple[int, int, int]] = {}
    vecs = np.empty((SIZE, SIZE, 2, 4), dtype=complex)
    base = (np.kron(_PLUS, _PLUS), _CZM @ np.kron(_PLUS, _PLUS))
    for ca in range(SIZE):
        for cb in range(SIZE):
            op = np.kron(MATS[ca], MATS[cb])
            for e in range(2):
                v = op @ base[e]
                vecs[ca, cb, e] = v
                reps.setdefault(_key(v.reshape(2, 2)), (ca, cb, e))
    table = np.empty((SIZE, SIZE, 2, 3), dtype=np.int8)
    for ca in range(SIZE):
        for cb in range(SIZE):
            for e in range(2):
                out = _CZM @ vecs[ca, cb, e]
                table[ca, cb, e] = reps[_key(out.reshape(2, 2))]
    return table


def _build_afresh_table() -> np.ndarray:
    """CZ rewrite when only vertex a is fresh (no neighbor besides b).

    Family of 4x2 maps (c_a x c_b) CZ^e (|+>_a x id_b); b may carry any
    entanglement, so equality of these restricted maps mod phase is the
    correctness condition.  The family is closed under CZ only when c_b
    is diagonal, which is the one situation the kernel consults it in
    (b's operator was reduced first); other c_b slots stay -1.
    """
    inject = np.kron(_PLUS.reshape(2, 1), np.eye(2, dtype=complex))
    reps: dict[tuple, tuple[int, int, int]] = {}
    mapz = np.empty((SIZE, SIZE, 2, 4, 2), dtype=complex)
    for ca in range(SIZE):
        for cb in range(SIZE):
            op = np.kron(MATS[ca], MATS[cb])
            for e in range(2):
                m = op @ (np.linalg.matrix_power(_CZM, e) @ inject)
                mapz[ca, cb, e] = m
                reps.setdefault(_key(m), (ca, cb, e))
    table = np.full((SIZE, SIZE, 2, 3), -1, dtype=np.int8)
    for ca in range(SIZE):
        for cb in range(SIZE):
            if not IS_DIAGONAL[cb]:
                continue
            for e in range(2):
                out = _CZM @ mapz[ca, cb, e]
                table[ca, cb, e] = reps[_key(out)]
    return table


T_PAIR = _build_pair_table()
T_AFRESH = _build_afresh_table()

for _arr in (MUL, ADJ, CONJ_AXIS, CONJ_SIGN, IS_DIAGONAL, COSET_REP, LEFT_PAULI, T_PAIR, T_AFRESH):
    _arr.flags.writeable = False
for _m in MATS:
    _m.flags.writeable = False
