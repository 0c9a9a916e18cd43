"""Reference pipeline for heralded-entanglement attempts, used only by tests.

Everything here is deliberately brute force: the two emitters (three levels
each: ground 0, ground 1, excited) and the two detector modes (Fock space
truncated at two photons) are one explicit 81-dimensional register, evolved
as a density matrix through excitation, emission, the beamsplitter, photon
loss (Kraus operators) and detection (a diagonal POVM with dark counts).
The production code in spinweave.erasure reaches the same numbers by
enumerating amplitude branches; any disagreement beyond rounding is a bug
in one of the two.
"""

import numpy as np

LEVELS = 3          # emitter: 0, 1, excited
CUT = 3             # photon counts 0, 1, 2 per mode
DIMS = (LEVELS, LEVELS, CUT, CUT)   # emitter A, emitter B, mode L, mode R
DIM = LEVELS * LEVELS * CUT * CUT

EXC = 2             # index of the excited emitter level

# matter basis picks: (A,B) in {0,1}^2 out of the 9 two-emitter levels,
# ordered with A as the high bit to match ket("AB") in the main test suite
_MATTER_PICKS = [0 * LEVELS + 0, 0 * LEVELS + 1, 1 * LEVELS + 0, 1 * LEVELS + 1]


def _lift(op: np.ndarray, slot: int) -> np.ndarray:
    """Embed a single-subsystem operator into the full register."""
    mats = [np.eye(d, dtype=complex) for d in DIMS]
    mats[slot] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def _annihilator() -> np.ndarray:
    a = np.zeros((CUT, CUT), dtype=complex)
    for n in range(1, CUT):
        a[n - 1, n] = np.sqrt(n)
    return a


def _splitter_unitary() -> np.ndarray:
    """Fock-space beamsplitter sending aL+ -> (i bL+ + bR+)/sqrt2 etc.

    Built from the mode-mixing Hamiltonian H = aL+ aR + aR+ aL evolved for
    an angle pi/4, which alone gives aL+ -> (aL+ - i aR+)/sqrt2; the extra
    per-photon factor i is supplied by a photon-number phase. The action on
    creation operators is asserted before use.
    """
    a = _annihilator()
    hop = np.kron(a.conj().T, a) + np.kron(a, a.conj().T)   # on modes L,R
    vals, vecs = np.linalg.eigh(hop)
    u = vecs @ np.diag(np.exp(-1j * (np.pi / 4) * vals)) @ vecs.conj().T

    n_op = np.diag(np.arange(CUT)).astype(complex)
    n_tot = np.kron(n_op, np.eye(CUT)) + np.kron(np.eye(CUT), n_op)
    phase = np.diag(1j ** np.diag(n_tot))
    u = phase @ u

    create_l = np.kron(a.conj().T, np.eye(CUT))
    create_r = np.kron(np.eye(CUT), a.conj().T)
    want_l = (1j * create_l + create_r) / np.sqrt(2)
    want_r = (create_l + 1j * create_r) / np.sqrt(2)
    got_l = u @ create_l @ u.conj().T
    got_r = u @ create_r @ u.conj().T
    # the cutoff truncates the top Fock level, so compare only the columns
    # whose image stays inside the register (input counts <= 1)
    keep = [i for i in range(CUT * CUT) if divmod(i, CUT)[0] + divmod(i, CUT)[1] <= 1]
    assert np.max(np.abs((got_l - want_l)[:, keep])) < 1e-12
    assert np.max(np.abs((got_r - want_r)[:, keep])) < 1e-12

    full = np.kron(np.eye(LEVELS * LEVELS, dtype=complex), u)
    return full


_SPLITTER = _splitter_unitary()


def _excitation(kind: str, epsilon: float) -> np.ndarray:
    if kind == "pi":
        m = np.zeros((LEVELS, LEVELS), dtype=complex)
        m[0, 0] = 1.0
        m[EXC, 1] = 1.0
        m[1, EXC] = 1.0
    else:
        c = np.sqrt(1.0 - epsilon * epsilon)
        m = np.array([[c, 0.0, -epsilon],
                      [0.0, 1.0, 0.0],
                      [epsilon, 0.0, c]], dtype=complex)
    return m


def _emission_matrix(emitter_slot: int) -> np.ndarray:
    """Decay excited -> 1 with one photon created in the emitter's channel.

    Emitter A feeds mode L, emitter B feeds mode R. The channel is empty
    before its emitter decays, so the created photon always lands on an
    unoccupied mode and the map is an isometry on every reachable state.
    """
    mode_slot = 2 if emitter_slot == 0 else 3
    m = np.zeros((DIM, DIM), dtype=complex)
    for idx in range(DIM):
        la, lb, nl, nr = np.unravel_index(idx, DIMS)
        levels = [la, lb]
        counts = [nl, nr]
        if levels[emitter_slot] != EXC:
            m[idx, idx] = 1.0
            continue
        if counts[mode_slot - 2] + 1 >= CUT:
            continue                       # unreachable: channel not empty
        levels[emitter_slot] = 1
        counts[mode_slot - 2] += 1
        tgt = np.ravel_multi_index((levels[0], levels[1], counts[0], counts[1]), DIMS)
        m[tgt, idx] = 1.0
    return m


_EMIT_A = _emission_matrix(0)
_EMIT_B = _emission_matrix(1)


def _loss_kraus(eta: float) -> list[np.ndarray]:
    from math import comb
    ops = []
    for k in range(CUT):
        m = np.zeros((CUT, CUT), dtype=complex)
        for n in range(k, CUT):
            m[n - k, n] = np.sqrt(comb(n, k) * eta ** (n - k) * (1.0 - eta) ** k)
        ops.append(m)
    return ops


def _povm(dark: float, number_resolving: bool) -> dict[int, np.ndarray]:
    if number_resolving:
        out = {}
        for c in range(CUT + 1):
            e = np.zeros((CUT, CUT), dtype=complex)
            for n in range(CUT):
                for extra in (0, 1):
                    if n + extra != c:
                        continue
                    w = dark if extra else 1.0 - dark
                    e[n, n] += w
            if np.max(np.abs(e)) > 0:
                out[c] = e
        return out
    click = np.diag([dark, 1.0, 1.0]).astype(complex)
    quiet = np.diag([1.0 - dark, 0.0, 0.0]).astype(complex)
    table = {}
    if dark < 1.0:
        table[0] = quiet
    if np.max(np.abs(click)) > 0:
        table[1] = click
    return table


def _embed_matter(rho4: np.ndarray) -> np.ndarray:
    big = np.zeros((DIM, DIM), dtype=complex)
    slots = [np.ravel_multi_index((p // LEVELS, p % LEVELS, 0, 0), DIMS)
             for p in _MATTER_PICKS]
    for i, si in enumerate(slots):
        for j, sj in enumerate(slots):
            big[si, sj] = rho4[i, j]
    return big


def _extract_matter(rho: np.ndarray) -> np.ndarray:
    nine = np.trace(
        rho.reshape(LEVELS * LEVELS, CUT * CUT, LEVELS * LEVELS, CUT * CUT),
        axis1=1, axis2=3,
    )
    # excited-level population must be gone after emission
    others = [i for i in range(LEVELS * LEVELS) if i not in _MATTER_PICKS]
    assert np.max(np.abs(nine[np.ix_(others, others)])) < 1e-13
    return nine[np.ix_(_MATTER_PICKS, _MATTER_PICKS)]


def oracle_round(rho4: np.ndarray, *, eta: float, dark: float,
                 number_resolving: bool, excite: str,
                 epsilon: float = 0.0) -> dict[tuple[int, int], np.ndarray]:
    """One excitation/emission/detection window.

    Takes an (unnormalized) two-qubit matter density, returns a map from
    the observed click pair (left, right) to the unnormalized conditional
    matter density; the traces sum to the input trace.
    """
    rho = _embed_matter(rho4)
    exc = _excitation(excite, epsilon)
    u = _lift(exc, 0) @ _lift(exc, 1)
    rho = u @ rho @ u.conj().T
    rho = _EMIT_A @ rho @ _EMIT_A.conj().T
    rho = _EMIT_B @ rho @ _EMIT_B.conj().T
    rho = _SPLITTER @ rho @ _SPLITTER.conj().T

    lost = np.zeros_like(rho)
    kraus = _loss_kraus(eta)
    for kl in kraus:
        big_l = _lift(kl, 2)
        for kr in kraus:
            big = big_l @ _lift(kr, 3)
            lost += big @ rho @ big.conj().T
    rho = lost

    povm = _povm(dark, number_resolving)
    table = {}
    for cl, el in povm.items():
        for cr, er in povm.items():
            m = _lift(el, 2) @ _lift(er, 3)
            sub = m @ rho
            p = np.trace(sub).real
            if p < 1e-30:
                continue
            table[(cl, cr)] = _extract_matter(sub)
    return table


_XX = np.array([[0, 0, 0, 1],
                [0, 0, 1, 0],
                [0, 1, 0, 0],
                [1, 0, 0, 0]], dtype=complex)


def oracle_attempt_table(amps4: np.ndarray, scheme: str, *, eta: float,
                         dark: float, epsilon: float = 0.0,
                         number_resolving: bool = True):
    """Full attempt: maps observation key -> (probability, normalized 4x4).

    Observation keys are tuples of per-round click pairs: one entry for the
    single-round schemes, two for the two-round scheme.
    """
    rho4 = np.outer(amps4, amps4.conj())
    excite = "weak" if scheme == "weak-excitation" else "pi"
    first = oracle_round(rho4, eta=eta, dark=dark,
                         number_resolving=number_resolving,
                         excite=excite, epsilon=epsilon)
    out = {}
    if scheme != "two-photon":
        for obs, rho in first.items():
            p = np.trace(rho).real
            out[(obs,)] = (p, rho / p)
        return out
    for obs1, rho1 in first.items():
        flipped = _XX @ rho1 @ _XX
        second = oracle_round(flipped, eta=eta, dark=dark,
                              number_resolving=number_resolving,
                              excite="pi")
        for obs2, rho2 in second.items():
            p = np.trace(rho2).real
            if p < 1e-30:
                continue
            out[(obs1, obs2)] = (p, rho2 / p)
    return out
