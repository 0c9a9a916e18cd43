"""One heralded entanglement attempt between two optically active qubits.

An attempt excites both emitters, lets each decay into its own optical
channel, interferes the channels on a beamsplitter so a detected photon
carries no which-source information, and reads two detectors. The module
enumerates every emission/loss/dark-count history exactly (no sampling) and
exposes both the exact tables and a fast sampled-attempt interface driven by
one uniform draw per attempt.

Conventions fixed here and relied on everywhere else:

- matter kets are written |AB> with A the high bit (qubit 1 of a two-qubit
  state), matching the rest of the package;
- emitter A feeds the left channel, emitter B the right one, and the
  splitter sends a_L -> (i b_L + b_R)/sqrt(2), a_R -> (b_L + i b_R)/sqrt(2);
- a lone left click projects onto odd parity with phase p = -i, a lone
  right click with p = +i, i.e. the operator |10><10| + p |01><01|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ZeroProbabilityError
from .statevec import DensityState, PureState, basis_state, fidelity, init_plus

SCHEMES = ("ideal-single-click", "weak-excitation", "two-photon")

_SQRT_HALF = 1.0 / math.sqrt(2.0)

_XX = np.array([[0, 0, 0, 1],
                [0, 0, 1, 0],
                [0, 1, 0, 0],
                [1, 0, 0, 0]], dtype=complex)


@dataclass(frozen=True)
class ApparatusParams:
    """Detection-apparatus model for one attempt window.

    eta is the probability that an emitted photon survives all the way
    through its detector; dark_prob is the per-detector chance of a spurious
    click in the window; epsilon is the excitation amplitude used only by
    the weak-excitation scheme.
    """

    scheme: str = "ideal-single-click"
    eta: float = 1.0
    dark_prob: float = 0.0
    epsilon: float = 0.1
    number_resolving: bool = True

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not 0.0 <= self.eta <= 1.0:
            raise ValueError("eta must lie in [0, 1]")
        if not 0.0 <= self.dark_prob <= 1.0:
            raise ValueError("dark_prob must lie in [0, 1]")
        if self.scheme == "weak-excitation" and not 0.0 < self.epsilon <= 1.0:
            raise ValueError("epsilon must lie in (0, 1]")


@dataclass(frozen=True)
class HeraldRecord:
    """What one sampled attempt reported and what it did to the qubits.

    post_state is conditioned on the observed clicks only; loss and dark
    events the protocol cannot see stay averaged over, so it may be mixed.
    false_herald marks accepted attempts whose history was not the intended
    single-photon pathway; the protocol itself never sees this flag.
    """

    clicks_left: int
    clicks_right: int
    accepted: bool
    projection_phase: complex | None
    false_herald: bool
    post_state: PureState | DensityState
    probability: float
    round_clicks: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class OutcomeRecord:
    """Exact enumeration entry for one observable click pattern."""

    observation: tuple[tuple[int, int], ...]
    probability: float
    accepted: bool
    projection_phase: complex | None
    false_fraction: float
    post_state: PureState | DensityState
    fidelity: float | None = None


class EmitterState:
    """Post-splitter snapshot: detector-mode occupation -> matter amplitudes.

    Each emitter releases at most one photon per window, so no more than two
    photons ever occupy the pair of detector modes.
    """

    def __init__(self, configs: dict[tuple[int, int], np.ndarray]):
        clean = {}
        for (nl, nr), vec in sorted(configs.items()):
            if nl + nr > 2:
                raise ValueError("more than two photons in one window")
            arr = np.asarray(vec, dtype=complex).copy()
            arr.flags.writeable = False
            clean[(nl, nr)] = arr
        self.configs = clean

    def norm_sq(self) -> float:
        return math.fsum(float(np.vdot(v, v).real) for v in self.configs.values())

    def photon_patterns(self) -> list[tuple[int, int]]:
        return sorted(self.configs)


def beamsplitter_map(amp_l: complex, amp_r: complex) -> tuple[complex, complex]:
    """Single-photon channel amplitudes before -> after the splitter."""
    return (
        (1j * amp_l + amp_r) * _SQRT_HALF,
        (amp_l + 1j * amp_r) * _SQRT_HALF,
    )


# per-emitter channel weights after the splitter: emitter A feeds the left
# input, so its photon appears as (i, 1)/sqrt(2) over (b_L, b_R); emitter B
# mirrors it
_CHANNEL = {
    0: beamsplitter_map(1.0, 0.0),
    1: beamsplitter_map(0.0, 1.0),
}


def _emission_paths(excite: str, epsilon: float, level: int):
    """Options for one emitter: (emits, amplitude, level afterwards)."""
    if excite == "pi":
        if level == 1:
            return ((True, 1.0, 1),)
        return ((False, 1.0, 0),)
    if level == 0:
        keep = math.sqrt(1.0 - epsilon * epsilon)
        return ((False, keep, 0), (True, epsilon, 1))
    return ((False, 1.0, 1),)


def _emission_configs(vec: np.ndarray, excite: str, epsilon: float):
    """Map detector-mode occupation (nL, nR) -> unnormalized matter vector."""
    configs: dict[tuple[int, int], np.ndarray] = {}
    for idx in range(4):
        amp = vec[idx]
        if amp == 0:
            continue
        bit_a, bit_b = idx >> 1, idx & 1
        for emit_a, wa, new_a in _emission_paths(excite, epsilon, bit_a):
            for emit_b, wb, new_b in _emission_paths(excite, epsilon, bit_b):
                photon = {(0, 0): amp * wa * wb}
                if emit_a:
                    photon = _create_photon(photon, _CHANNEL[0])
                if emit_b:
                    photon = _create_photon(photon, _CHANNEL[1])
                tgt = (new_a << 1) | new_b
                for counts, c in photon.items():
                    if c == 0:
                        continue
                    slot = configs.setdefault(counts, np.zeros(4, dtype=complex))
                    slot[tgt] += c
    return {k: v for k, v in configs.items() if np.any(v != 0)}


def _create_photon(photon, weights):
    wl, wr = weights
    out: dict[tuple[int, int], complex] = {}
    for (nl, nr), amp in photon.items():
        out[(nl + 1, nr)] = out.get((nl + 1, nr), 0.0) + amp * wl * math.sqrt(nl + 1)
        out[(nl, nr + 1)] = out.get((nl, nr + 1), 0.0) + amp * wr * math.sqrt(nr + 1)
    return out


def _binom_p(n: int, k: int, eta: float) -> float:
    return math.comb(n, k) * eta ** (n - k) * (1.0 - eta) ** k


def _round_branches(vec, excite, epsilon, params):
    """Yield (observation, weight, matter vector, ideal-pathway flag).

    weight excludes the squared norm of the matter vector; the observation
    is what the detectors report, with loss and dark events already folded
    into the weight. Branches with distinct loss/dark histories never
    interfere, so each is yielded separately.
    """
    dark = params.dark_prob
    darkw = (1.0 - dark, dark)
    for (nl, nr), v in sorted(_emission_configs(vec, excite, epsilon).items()):
        for kl in range(nl + 1):
            for kr in range(nr + 1):
                lossw = _binom_p(nl, kl, params.eta) * _binom_p(nr, kr, params.eta)
                if lossw == 0.0:
                    continue
                det_l, det_r = nl - kl, nr - kr
                for dl in (0, 1):
                    for dr in (0, 1):
                        w = lossw * darkw[dl] * darkw[dr]
                        if w == 0.0:
                            continue
                        if params.number_resolving:
                            obs = (det_l + dl, det_r + dr)
                        else:
                            obs = (int(det_l > 0 or dl == 1),
                                   int(det_r > 0 or dr == 1))
                        ideal = (kl == 0 and kr == 0 and dl == 0 and dr == 0
                                 and nl + nr == 1)
                        yield obs, w, v, ideal


def _round_phase(obs: tuple[int, int]) -> complex:
    return -1j if obs[0] > 0 else 1j


def _accepted(observation: tuple[tuple[int, int], ...]) -> bool:
    return all(l + r == 1 for l, r in observation)


def _net_phase(observation) -> complex | None:
    if not _accepted(observation):
        return None
    phases = [_round_phase(o) for o in observation]
    if len(phases) == 1:
        return phases[0]
    # two projections with a double flip between them compose into a single
    # odd-parity projection whose phase is the ratio of the round phases
    return phases[1] / phases[0]


class OutcomeTable:
    """Exact attempt enumeration plus the sampler built on top of it."""

    def __init__(self, records: tuple[OutcomeRecord, ...],
                 branch_cum: np.ndarray, branch_info: tuple):
        self.records = records
        self.by_observation = {r.observation: r for r in records}
        self._cum = branch_cum
        self._info = branch_info

    def sample(self, rng) -> tuple[OutcomeRecord, bool]:
        u = rng.random()
        i = int(np.searchsorted(self._cum, u, side="right"))
        i = min(i, len(self._info) - 1)
        key, is_false = self._info[i]
        return self.by_observation[key], is_false


def _collect_branches(vec: np.ndarray, params: ApparatusParams):
    scheme = params.scheme
    excite = "weak" if scheme == "weak-excitation" else "pi"
    if scheme != "two-photon":
        return [((obs,), w, v, ideal)
                for obs, w, v, ideal in _round_branches(vec, excite,
                                                        params.epsilon, params)]
    branches = []
    for obs1, w1, v1, ideal1 in _round_branches(vec, "pi", 0.0, params):
        mid = _XX @ v1
        for obs2, w2, v2, ideal2 in _round_branches(mid, "pi", 0.0, params):
            branches.append(((obs1, obs2), w1 * w2, v2, ideal1 and ideal2))
    return branches


def _build_table(vec: np.ndarray, params: ApparatusParams) -> OutcomeTable:
    grouped: dict[tuple, list] = {}
    for key, w, v, ideal in _collect_branches(vec, params):
        grouped.setdefault(key, []).append((w, v, ideal))

    records = []
    branch_probs: list[float] = []
    branch_info: list[tuple] = []
    for key in sorted(grouped):
        parts = grouped[key]
        probs = [w * float(np.vdot(v, v).real) for w, v, _ in parts]
        prob = math.fsum(probs)
        if prob <= 0.0:
            continue
        false_prob = math.fsum(p for p, (_, _, ideal) in zip(probs, parts)
                               if not ideal)
        post = _conditional_state(parts, prob)
        accepted = _accepted(key)
        records.append(OutcomeRecord(
            observation=key,
            probability=prob,
            accepted=accepted,
            projection_phase=_net_phase(key),
            false_fraction=false_prob / prob if accepted else 0.0,
            post_state=post,
        ))
        for p, (_, _, ideal) in zip(probs, parts):
            if p <= 0.0:
                continue
            branch_probs.append(p)
            branch_info.append((key, accepted and not ideal))

    total = math.fsum(branch_probs)
    assert abs(total - 1.0) < 1e-10, f"attempt histories sum to {total}"
    cum = np.cumsum(np.asarray(branch_probs))
    cum[-1] = max(cum[-1], 1.0)
    return OutcomeTable(tuple(records), cum, tuple(branch_info))


def _conditional_state(parts, prob) -> PureState | DensityState:
    first = None
    pure = True
    for w, v, _ in parts:
        if w <= 0.0 or not np.any(v):
            continue
        if first is None:
            first = v
            continue
        overlap = abs(np.vdot(first, v))
        scale = np.linalg.norm(first) * np.linalg.norm(v)
        if abs(overlap - scale) > 1e-10 * scale:
            pure = False
            break
    if pure and first is not None:
        return PureState(first / np.linalg.norm(first))
    rho = np.zeros((4, 4), dtype=complex)
    for w, v, _ in parts:
        rho += w * np.outer(v, v.conj())
    rho = (rho + rho.conj().T) / (2.0 * prob)
    return DensityState(rho)


@lru_cache(maxsize=64)
def _cached_table(amp_bytes: bytes, params: ApparatusParams) -> OutcomeTable:
    vec = np.frombuffer(amp_bytes, dtype=complex)
    return _build_table(vec, params)


def enumerate_attempt(state: PureState, params: ApparatusParams) -> tuple[OutcomeRecord, ...]:
    """Exact outcome table for one attempt on a normalized two-qubit state."""
    if state.num_qubits != 2:
        raise ValueError("an attempt acts on exactly two matter qubits")
    return _cached_table(state.amplitudes.tobytes(), params).records


def _table_for(state: PureState, params: ApparatusParams) -> OutcomeTable:
    if state.num_qubits != 2:
        raise ValueError("an attempt acts on exactly two matter qubits")
    return _cached_table(state.amplitudes.tobytes(), params)


def lossy_attempt(state: PureState, params: ApparatusParams, rng) -> HeraldRecord:
    """Sample one attempt; a single uniform draw decides the full history."""
    record, is_false = _table_for(state, params).sample(rng)
    left = sum(o[0] for o in record.observation)
    right = sum(o[1] for o in record.observation)
    return HeraldRecord(
        clicks_left=left,
        clicks_right=right,
        accepted=record.accepted,
        projection_phase=record.projection_phase,
        false_herald=is_false,
        post_state=record.post_state,
        probability=record.probability,
        round_clicks=record.observation,
    )


def ideal_attempt(state: PureState, rng) -> HeraldRecord:
    """Lossless, dark-free, number-resolved attempt (same code path)."""
    return lossy_attempt(state, ApparatusParams(), rng)


def emit_and_erase(state: PureState, excite: str = "pi",
                   epsilon: float = 0.0) -> EmitterState:
    """Run excitation, emission and the splitter; stop before the detectors."""
    if state.num_qubits != 2:
        raise ValueError("an attempt acts on exactly two matter qubits")
    return EmitterState(_emission_configs(state.amplitudes, excite, epsilon))


def parity_project(state: PureState, a: int, b: int, p: complex) -> tuple[PureState, float]:
    """Keep only odd-parity components of qubits (a, b).

    The component with qubit a set and qubit b clear keeps unit weight; the
    mirrored component is weighted by p, which is +i or -i according to the
    detector that clicked. Returns the renormalized state and the squared
    norm that was kept.
    """
    if p not in (1j, -1j):
        raise ValueError("projection phase must be +i or -i")
    if a == b:
        raise ValueError("projection needs two distinct qubits")
    n = state.num_qubits
    if not (0 <= a < n and 0 <= b < n):
        raise ValueError("qubit index out of range")
    idx = np.arange(1 << n)
    bit_a = (idx >> a) & 1
    bit_b = (idx >> b) & 1
    coeff = np.where((bit_a == 1) & (bit_b == 0), 1.0 + 0.0j,
                     np.where((bit_a == 0) & (bit_b == 1), p, 0.0))
    amps = state.amplitudes * coeff
    kept = float(np.vdot(amps, amps).real)
    if kept < 1e-18:
        raise ZeroProbabilityError(
            "state has no odd-parity component on the projected pair")
    return PureState(amps / math.sqrt(kept)), kept


def canonical_input(scheme: str) -> PureState:
    """The matter state each scheme is normally run from."""
    if scheme == "weak-excitation":
        return basis_state("00")
    if scheme in SCHEMES:
        return init_plus(2)
    raise ValueError(f"unknown scheme {scheme!r}")


def _ideal_reference(params: ApparatusParams, state: PureState):
    ideal = ApparatusParams(scheme=params.scheme, eta=1.0, dark_prob=0.0,
                            epsilon=params.epsilon, number_resolving=True)
    table = _table_for(state, ideal)
    return {r.observation: r.post_state for r in table.records if r.accepted}


def _state_fidelity(post, target: PureState) -> float:
    if isinstance(post, PureState):
        return float(abs(np.vdot(target.amplitudes, post.amplitudes)) ** 2)
    return fidelity(post, target)


@dataclass(frozen=True)
class PerformanceSummary:
    success_prob: float
    fidelity: float
    click_table: tuple[OutcomeRecord, ...]


def heralded_performance(params: ApparatusParams,
                         state: PureState | None = None) -> PerformanceSummary:
    """Exact success probability and accepted-state fidelity.

    Fidelity is measured per click pattern against the state a perfect
    apparatus would have heralded for that same pattern, then averaged with
    the patterns' probabilities. No sampling is involved anywhere.
    """
    if state is None:
        state = canonical_input(params.scheme)
    targets = _ideal_reference(params, state)
    rows = []
    succ_terms: list[float] = []
    fid_terms: list[float] = []
    for rec in _table_for(state, params).records:
        fid = None
        if rec.accepted:
            target = targets.get(rec.observation)
            if not isinstance(target, PureState):
                raise ValueError(
                    f"pattern {rec.observation} has no pure reference state: "
                    "a perfect apparatus never heralds it for this input")
            fid = _state_fidelity(rec.post_state, target)
            succ_terms.append(rec.probability)
            fid_terms.append(rec.probability * fid)
        rows.append(OutcomeRecord(
            observation=rec.observation,
            probability=rec.probability,
            accepted=rec.accepted,
            projection_phase=rec.projection_phase,
            false_fraction=rec.false_fraction,
            post_state=rec.post_state,
            fidelity=fid,
        ))
    success = math.fsum(succ_terms)
    mean_fid = math.fsum(fid_terms) / success if success > 0 else float("nan")
    return PerformanceSummary(success, mean_fid, tuple(rows))


def success_rate_model(scheme: str, eta: float) -> float:
    """Closed-form per-attempt success probability used by timing budgets."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    if not 0.0 <= eta <= 1.0:
        raise ValueError("eta must lie in [0, 1]")
    if scheme == "two-photon":
        return 0.5 * eta * eta
    return 0.5 * eta


def _phase_json(p: complex | None):
    if p is None:
        return None
    return [p.real, p.imag]


def performance_report(params: ApparatusParams,
                       state: PureState | None = None) -> dict:
    """JSON-ready summary of the exact enumeration."""
    perf = heralded_performance(params, state)
    table = []
    for rec in perf.click_table:
        table.append({
            "clicks": [list(o) for o in rec.observation],
            "probability": rec.probability,
            "accepted": rec.accepted,
            "projection_phase": _phase_json(rec.projection_phase),
            "false_fraction": rec.false_fraction,
            "fidelity": rec.fidelity,
        })
    report = {
        "scheme": params.scheme,
        "eta": params.eta,
        "dark_prob": params.dark_prob,
        "number_resolving": params.number_resolving,
        "success_prob": perf.success_prob,
        "fidelity": perf.fidelity,
        "click_table": table,
    }
    if params.scheme == "weak-excitation":
        report["epsilon"] = params.epsilon
    return report
