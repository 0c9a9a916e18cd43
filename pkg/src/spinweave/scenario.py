"""Experiment configs and their seeded, reproducible execution.

A scenario file is flat text, one ``key = value`` assignment per line.
Blank lines and lines starting with ``#`` are skipped; there are no
sections, no quoting, no inline comments.  Keys are lowercase
identifiers and may appear once.  Every scenario names an experiment:

========== ======================================================
entangle    sample heralded link attempts from a fixed |++> pair
grow        branch growth statistics or a brokered node chain
run-pattern execute a measurement pattern or compiled circuit
prune       carve a target graph out of a rectangular cluster
budget      timing/coherence report for a hardware parameter set
verify      run the built-in oracle-equivalence suites
========== ======================================================

Common keys: ``experiment`` (required), ``seed`` (default 0) and
``trials`` (default 1).  The remaining keys belong to the chosen
experiment; unknown keys are rejected so typos fail loudly.  File
references (``target``) are resolved relative to the scenario file.

Reproducibility contract: trial ``t`` draws from a generator seeded
with ``SeedSequence(seed, spawn_key=(t,))``, so records depend only on
the scenario content, the seed and the trial count, never on execution
order.  The record carries a digest of the canonicalized assignments;
comments and line order do not change it.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import budget as bd
from .erasure import ApparatusParams, lossy_attempt, success_rate_model
from .graph.register import GraphRegister
from .growth import (DEFAULT_ATTEMPT_TIME, BrokerNode, LinkModel, broker_bell,
                     broker_to_client_edge, simulate_branch_growth)
from .errors import ScenarioError
from .mbqc import (apply_frame, chain_blueprint_for_entries, circuit_from_json,
                   compile_circuit, entries_from_json, MeasurementPattern,
                   run_pattern, prune_cluster)
from .statevec import qubit_state, tensor
from .verify import run_verify

__all__ = [
    "EXPERIMENTS",
    "RunRecord",
    "Scenario",
    "load_scenario",
    "parse_scenario_text",
    "run_scenario",
    "trial_rng",
]

EXPERIMENTS = ("entangle", "grow", "run-pattern", "prune", "budget", "verify")

_COMMON_KEYS = frozenset({"experiment", "seed", "trials"})
_EXPERIMENT_KEYS = {
    "entangle": frozenset({"hardware", "scheme", "eta", "dark_prob",
                           "epsilon", "number_resolving", "attempt_time"}),
    "grow": frozenset({"hardware", "strategy", "p_success", "attempt_time",
                       "steps", "nodes", "backend"}),
    "run-pattern": frozenset({"target", "target_kind", "inputs", "order"}),
    "prune": frozenset({"rows", "cols", "target"}),
    "budget": frozenset({"hardware", "scheme", "eta", "dark_prob",
                         "attempt_time", "t1", "t2_pure_dephasing",
                         "fault_budget", "cavity_q", "cavity_mode_volume",
                         "cavity_index"}),
    "verify": frozenset({"suite", "inject_failure"}),
}


@dataclass(frozen=True)
class Scenario:
    experiment: str
    seed: int
    trials: int
    params: dict
    digest: str
    source: str

    def base_dir(self) -> Path:
        return Path(self.source).resolve().parent


@dataclass(frozen=True)
class RunRecord:
    """One completed scenario run.

    Identical scenario + seed + trials reproduces every field except
    wall_clock_s bit for bit.
    """

    experiment: str
    digest: str
    seed: int
    trials: int
    per_trial: tuple
    aggregate: dict
    model_time: float | None
    wall_clock_s: float

    def as_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "digest": self.digest,
            "seed": self.seed,
            "trials": self.trials,
            "per_trial": list(self.per_trial),
            "aggregate": self.aggregate,
            "model_time_s": self.model_time,
            "wall_clock_s": self.wall_clock_s,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, sort_keys=True)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """The documented per-trial stream: trial index spawned off the seed."""
    return np.random.default_rng(np.random.SeedSequence(seed,
                                                        spawn_key=(trial,)))


def _digest(pairs: dict) -> str:
    canon = "".join(f"{k}={pairs[k]}\n" for k in sorted(pairs))
    return hashlib.sha256(canon.encode()).hexdigest()


def parse_scenario_text(text: str, source: str = "<scenario>") -> Scenario:
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ScenarioError(f"{source}:{lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key, value = key.strip(), value.strip()
        if not key.isidentifier() or not key.islower():
            raise ScenarioError(
                f"{source}:{lineno}: bad key {key!r} (lowercase identifiers)")
        if not value:
            raise ScenarioError(f"{source}:{lineno}: empty value for {key!r}")
        if key in pairs:
            raise ScenarioError(f"{source}:{lineno}: duplicate key {key!r}")
        pairs[key] = value

    if "experiment" not in pairs:
        raise ScenarioError(f"{source}: missing required key 'experiment'")
    experiment = pairs["experiment"]
    if experiment not in EXPERIMENTS:
        raise ScenarioError(
            f"{source}: field 'experiment': unknown value {experiment!r}; "
            f"expected one of {', '.join(EXPERIMENTS)}")
    allowed = _COMMON_KEYS | _EXPERIMENT_KEYS[experiment]
    unknown = sorted(set(pairs) - allowed)
    if unknown:
        raise ScenarioError(
            f"{source}: unknown key(s) for {experiment}: {', '.join(unknown)}")

    seed = _parse_int(pairs.get("seed", "0"), "seed", source,
                      minimum=0, maximum=2 ** 64 - 1)
    trials = _parse_int(pairs.get("trials", "1"), "trials", source, minimum=1)
    extras = {k: v for k, v in pairs.items() if k not in _COMMON_KEYS}
    return Scenario(experiment=experiment, seed=seed, trials=trials,
                    params=extras, digest=_digest(pairs), source=source)


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario {p}: {exc}") from exc
    return parse_scenario_text(text, source=str(p))


def _parse_int(raw: str, field: str, source: str, minimum=None, maximum=None):
    try:
        value = int(raw, 0)
    except ValueError:
        raise ScenarioError(
            f"{source}: field {field!r}: expected an integer, got {raw!r}")
    if minimum is not None and value < minimum:
        raise ScenarioError(f"{source}: field {field!r}: must be >= {minimum}")
    if maximum is not None and value > maximum:
        raise ScenarioError(f"{source}: field {field!r}: must be <= {maximum}")
    return value


class _Fields:
    """Typed access to a scenario's extra keys with uniform diagnostics."""

    def __init__(self, scenario: Scenario):
        self.sc = scenario
        self.src = scenario.source

    def has(self, key):
        return key in self.sc.params

    def str_(self, key, default=None):
        if key not in self.sc.params:
            if default is None:
                raise ScenarioError(
                    f"{self.src}: missing required key {key!r}")
            return default
        return self.sc.params[key]

    def int_(self, key, default=None, minimum=None, maximum=None):
        if key not in self.sc.params:
            if default is None:
                raise ScenarioError(
                    f"{self.src}: missing required key {key!r}")
            return default
        return _parse_int(self.sc.params[key], key, self.src,
                          minimum=minimum, maximum=maximum)

    def float_(self, key, default=None, positive=False):
        if key not in self.sc.params:
            if default is None:
                raise ScenarioError(
                    f"{self.src}: missing required key {key!r}")
            return default
        raw = self.sc.params[key]
        try:
            value = float(raw)
        except ValueError:
            raise ScenarioError(
                f"{self.src}: field {key!r}: expected a number, got {raw!r}")
        if positive and not value > 0.0:
            raise ScenarioError(f"{self.src}: field {key!r}: must be > 0")
        return value

    def bool_(self, key, default=False):
        if key not in self.sc.params:
            return default
        raw = self.sc.params[key].lower()
        if raw in ("true", "yes", "1", "on"):
            return True
        if raw in ("false", "no", "0", "off"):
            return False
        raise ScenarioError(
            f"{self.src}: field {key!r}: expected true/false, got {raw!r}")

    def choice(self, key, choices, default=None):
        value = self.str_(key, default)
        if value not in choices:
            raise ScenarioError(
                f"{self.src}: field {key!r}: expected one of "
                f"{', '.join(choices)}; got {value!r}")
        return value

    def path(self, key):
        raw = self.str_(key)
        p = Path(raw)
        if not p.is_absolute():
            p = self.sc.base_dir() / p
        if not p.is_file():
            raise ScenarioError(
                f"{self.src}: field {key!r}: no such file: {p}")
        return p

    def preset(self, key="hardware"):
        if key not in self.sc.params:
            return None
        name = self.sc.params[key]
        if name not in bd.PRESETS:
            raise ScenarioError(
                f"{self.src}: field {key!r}: unknown preset {name!r}; "
                f"expected one of {', '.join(sorted(bd.PRESETS))}")
        return bd.PRESETS[name]


def run_scenario(scenario: Scenario, trials: int | None = None,
                 seed: int | None = None,
                 dump_state: bool = False,
                 inject_failure: bool = False) -> RunRecord:
    """Execute a scenario and collect the record.

    trials/seed override the file's values (command-line flags).
    """
    eff_trials = scenario.trials if trials is None else trials
    eff_seed = scenario.seed if seed is None else seed
    if eff_trials < 1:
        raise ScenarioError("field 'trials': must be >= 1")
    if not 0 <= eff_seed < 2 ** 64:
        raise ScenarioError("field 'seed': must fit in 64 bits")
    fields = _Fields(scenario)
    started = time.perf_counter()
    runner = _RUNNERS[scenario.experiment]
    per_trial, aggregate, model_time = runner(
        fields, eff_trials, eff_seed,
        dump_state=dump_state, inject_failure=inject_failure)
    wall = time.perf_counter() - started
    return RunRecord(
        experiment=scenario.experiment,
        digest=scenario.digest,
        seed=eff_seed,
        trials=eff_trials,
        per_trial=tuple(per_trial),
        aggregate=aggregate,
        model_time=model_time,
        wall_clock_s=wall,
    )


def _require_single_trial(fields, trials, what):
    if trials != 1:
        raise ScenarioError(
            f"{fields.src}: field 'trials': {what} is deterministic; "
            "omit trials or set it to 1")


def _apparatus_from(fields: _Fields) -> tuple[ApparatusParams, float]:
    preset = fields.preset()
    scheme = fields.str_("scheme",
                         default=preset.scheme if preset else None)
    eta = fields.float_("eta", default=preset.eta if preset else 1.0)
    dark = fields.float_("dark_prob",
                         default=preset.dark_prob if preset else 0.0)
    eps = fields.float_("epsilon", default=0.1)
    nr = fields.bool_("number_resolving", default=True)
    attempt_time = fields.float_(
        "attempt_time",
        default=preset.attempt_time if preset else DEFAULT_ATTEMPT_TIME,
        positive=True)
    try:
        params = ApparatusParams(scheme=scheme, eta=eta, dark_prob=dark,
                                 epsilon=eps, number_resolving=nr)
    except ValueError as exc:
        raise ScenarioError(f"{fields.src}: {exc}") from exc
    return params, attempt_time


def _clicks_key(record) -> str:
    return "|".join(f"{l}:{r}" for l, r in record.round_clicks)


def _run_entangle(fields, trials, seed, **_):
    params, attempt_time = _apparatus_from(fields)
    source = tensor(qubit_state("+"), qubit_state("+"))
    rows = []
    histogram: dict[str, int] = {}
    accepted = 0
    false_heralds = 0
    for t in range(trials):
        rec = lossy_attempt(source, params, trial_rng(seed, t))
        key = _clicks_key(rec)
        histogram[key] = histogram.get(key, 0) + 1
        accepted += rec.accepted
        false_heralds += rec.false_herald
        rows.append({"clicks": key,
                     "accepted": bool(rec.accepted),
                     "false_herald": bool(rec.false_herald)})
    aggregate = {
        "scheme": params.scheme,
        "eta": params.eta,
        "dark_prob": params.dark_prob,
        "accept_rate": accepted / trials,
        "false_herald_rate": false_heralds / trials,
        "clicks_histogram": dict(sorted(histogram.items())),
        "success_model": success_rate_model(params.scheme, params.eta),
    }
    return rows, aggregate, trials * attempt_time


def _link_from(fields: _Fields) -> LinkModel:
    preset = fields.preset()
    if preset is not None:
        default_p = success_rate_model(preset.scheme, preset.eta)
        default_t = preset.attempt_time
    else:
        default_p, default_t = None, DEFAULT_ATTEMPT_TIME
    p = fields.float_("p_success", default=default_p)
    attempt_time = fields.float_("attempt_time", default=default_t,
                                 positive=True)
    try:
        return LinkModel(p, attempt_time)
    except ValueError as exc:
        raise ScenarioError(f"{fields.src}: {exc}") from exc


def _run_grow(fields, trials, seed, **_):
    strategy = fields.choice("strategy", ("branch", "broker"),
                             default="branch")
    link = _link_from(fields)
    backend = fields.choice("backend", ("pure", "compiled", "auto"),
                            default="auto")
    backend = None if backend == "auto" else backend
    if strategy == "branch":
        steps = fields.int_("steps", default=1000, minimum=1)
        rows = []
        drifts = np.empty(trials)
        for t in range(trials):
            ens = simulate_branch_growth(link.p_success, steps, 1,
                                         trial_rng(seed, t),
                                         attempt_time=link.attempt_time,
                                         backend=backend)
            st = ens.per_trial[0]
            drifts[t] = ens.mean_drift
            rows.append({"drift": ens.mean_drift,
                         "successes": st.successes,
                         "qubits": st.qubits_in_state,
                         "edges": st.edges_created})
        stderr = (float(drifts.std(ddof=1) / np.sqrt(trials))
                  if trials > 1 else 0.0)
        aggregate = {
            "strategy": "branch",
            "p_success": link.p_success,
            "attempt_time_s": link.attempt_time,
            "steps": steps,
            "mean_drift": float(drifts.mean()),
            "stderr": stderr,
            "expected_drift": 3.0 * link.p_success - 1.0,
        }
        return rows, aggregate, trials * steps * link.attempt_time

    nodes_count = fields.int_("nodes", default=2, minimum=2)
    rows = []
    total_attempts = 0
    for t in range(trials):
        rng = trial_rng(seed, t)
        register = GraphRegister(backend=backend)
        nodes = [BrokerNode(i, register.new_vertex(), register.new_vertex())
                 for i in range(nodes_count)]
        attempts = []
        for i in range(1, nodes_count):
            a, b = nodes[i - 1], nodes[i]
            for node in (a, b):
                if node.broker_qubit not in register.vertices():
                    node.broker_qubit = register.new_vertex()
            attempts.append(broker_bell(a, b, link, register, rng))
            broker_to_client_edge(a, b, register, rng=rng)
        total_attempts += sum(attempts)
        rows.append({"attempts": attempts,
                     "total_attempts": sum(attempts),
                     "edges": nodes_count - 1})
    aggregate = {
        "strategy": "broker",
        "p_success": link.p_success,
        "attempt_time_s": link.attempt_time,
        "nodes": nodes_count,
        "mean_attempts_per_edge":
            total_attempts / (trials * (nodes_count - 1)),
        "expected_attempts_per_edge": 1.0 / link.p_success,
    }
    return rows, aggregate, total_attempts * link.attempt_time


def _load_pattern_target(fields: _Fields):
    kind = fields.choice("target_kind", ("circuit", "entries"),
                         default="circuit")
    path = fields.path("target")
    text = path.read_text()
    try:
        if kind == "circuit":
            spec = circuit_from_json(text)
            return compile_circuit(spec)
        entries = entries_from_json(text)
        return chain_blueprint_for_entries(entries), MeasurementPattern(
            tuple(entries))
    except (ValueError, KeyError, TypeError) as exc:
        raise ScenarioError(
            f"{fields.src}: field 'target': {path}: {exc}") from exc


def _run_pattern_exp(fields, trials, seed, dump_state=False, **_):
    blueprint, pattern = _load_pattern_target(fields)
    order = fields.choice("order", ("lazy", "eager"), default="lazy")
    tokens = fields.str_("inputs",
                         default=" ".join(["+"] * len(blueprint.inputs)))
    try:
        inputs = tuple(qubit_state(tok) for tok in tokens.split())
    except (ValueError, KeyError) as exc:
        raise ScenarioError(
            f"{fields.src}: field 'inputs': {exc}") from exc
    if len(inputs) != len(blueprint.inputs):
        raise ScenarioError(
            f"{fields.src}: field 'inputs': expected "
            f"{len(blueprint.inputs)} tokens, got {len(inputs)}")
    rows = []
    histogram: dict[str, int] = {}
    final_state = None
    for t in range(trials):
        res = run_pattern(blueprint, pattern, inputs,
                          rng=trial_rng(seed, t), order=order)
        key = "".join(str(b) for b in res.outcomes)
        histogram[key] = histogram.get(key, 0) + 1
        rows.append({"outcomes": key, "probability": res.probability})
        if dump_state and t == trials - 1:
            corrected = apply_frame(res.state, res.frame)
            final_state = [[float(a.real), float(a.imag)]
                           for a in corrected.amplitudes]
    aggregate = {
        "order": order,
        "wires": blueprint.num_wires,
        "vertices": blueprint.num_vertices,
        "outcome_counts": dict(sorted(histogram.items())),
    }
    if final_state is not None:
        aggregate["final_state"] = final_state
        aggregate["final_state_trial"] = trials - 1
    return rows, aggregate, None


def _run_prune(fields, trials, seed, **_):
    _require_single_trial(fields, trials, "prune")
    rows_n = fields.int_("rows", minimum=1)
    cols_n = fields.int_("cols", minimum=1)
    path = fields.path("target")
    try:
        raw = json.loads(path.read_text())
        adjacency = {int(k): tuple(int(x) for x in v)
                     for k, v in raw.items()}
    except (ValueError, AttributeError, TypeError) as exc:
        raise ScenarioError(
            f"{fields.src}: field 'target': {path}: expected a JSON object "
            f"mapping vertex to neighbour list ({exc})") from exc
    try:
        prescription = prune_cluster(rows_n, cols_n, adjacency)
    except ValueError as exc:
        raise ScenarioError(f"{fields.src}: {exc}") from exc
    rows = [{"prescription": [[v, axis] for v, axis in prescription]}]
    aggregate = {
        "rows": rows_n,
        "cols": cols_n,
        "measured": len(prescription),
        "y_count": sum(1 for _, axis in prescription if axis == "Y"),
        "z_count": sum(1 for _, axis in prescription if axis == "Z"),
    }
    return rows, aggregate, None


def _run_budget(fields, trials, seed, **_):
    _require_single_trial(fields, trials, "budget")
    fault = fields.float_("fault_budget", default=0.01)
    preset = fields.preset()
    if preset is None:
        cavity_keys = [k for k in ("cavity_q", "cavity_mode_volume",
                                   "cavity_index") if fields.has(k)]
        if cavity_keys and len(cavity_keys) != 3:
            raise ScenarioError(
                f"{fields.src}: cavity needs all three of cavity_q, "
                "cavity_mode_volume, cavity_index")
        try:
            cavity = None
            if cavity_keys:
                cavity = bd.CavityParams(
                    q=fields.float_("cavity_q"),
                    mode_volume=fields.float_("cavity_mode_volume"),
                    index=fields.float_("cavity_index"))
            preset = bd.HardwarePreset(
                name="custom",
                scheme=fields.str_("scheme"),
                eta=fields.float_("eta"),
                dark_prob=fields.float_("dark_prob", default=0.0),
                attempt_time=fields.float_("attempt_time", positive=True),
                spin=bd.SpinTimes(
                    t1=fields.float_("t1", default=np.inf),
                    t2_pure_dephasing=fields.float_("t2_pure_dephasing",
                                                    default=np.inf)),
                cavity=cavity)
        except ValueError as exc:
            raise ScenarioError(f"{fields.src}: {exc}") from exc
    try:
        report = bd.budget_report(preset, fault_budget=fault)
    except ValueError as exc:
        raise ScenarioError(f"{fields.src}: {exc}") from exc
    return [], report, None


def _run_verify(fields, trials, seed, inject_failure=False, **_):
    _require_single_trial(fields, trials, "verify")
    suite = fields.str_("suite", default="all")
    inject = fields.bool_("inject_failure", default=False) or inject_failure
    try:
        report = run_verify(suite, seed=seed, inject_failure=inject)
    except ValueError as exc:
        raise ScenarioError(f"{fields.src}: field 'suite': {exc}") from exc
    rows = [r.as_dict() for r in report.results]
    aggregate = {
        "passed": report.passed,
        "suites_run": len(report.results),
        "failed": [r.name for r in report.results if not r.passed],
    }
    return rows, aggregate, None


_RUNNERS = {
    "entangle": _run_entangle,
    "grow": _run_grow,
    "run-pattern": _run_pattern_exp,
    "prune": _run_prune,
    "budget": _run_budget,
    "verify": _run_verify,
}
