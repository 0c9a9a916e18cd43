"""Command-line entry point: run a scenario file, emit JSON or CSV.

Exit codes: 0 on success, 1 for configuration problems (bad flags,
unreadable or malformed scenario, missing target files, size limits),
2 when a verify scenario reports a failed suite.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import __version__
from .errors import ScenarioError, SizeLimitError
from .growth import branch_growth_trace, write_trace_csv
from .scenario import RunRecord, load_scenario, run_scenario, trial_rng

__all__ = ["build_parser", "main"]


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad flags; config errors must be 1
    def error(self, message):
        raise ScenarioError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="spinweave",
        description="Run a scenario file and emit a reproducible record.")
    parser.add_argument("--scenario", required=True, metavar="FILE",
                        help="scenario file (key = value lines)")
    parser.add_argument("--seed", type=int, default=None, metavar="U64",
                        help="override the scenario's master seed")
    parser.add_argument("--trials", type=int, default=None, metavar="N",
                        help="override the scenario's trial count")
    parser.add_argument("--out", default=None, metavar="DIR",
                        help="directory for record.json and CSV side files")
    parser.add_argument("--dump-state", action="store_true",
                        help="include the final corrected state amplitudes "
                             "(run-pattern only)")
    parser.add_argument("--format", choices=("json", "csv"), default="json",
                        help="stdout format (default json)")
    parser.add_argument("--inject-failure", action="store_true",
                        help="verify only: add a deliberately failing check")
    parser.add_argument("--version", action="version",
                        version=f"%(prog)s {__version__}")
    return parser


def _csv_cell(value):
    if isinstance(value, bool):
        return int(value)
    if isinstance(value, (list, tuple)):
        return ";".join(str(v) for v in value)
    return value


def _trial_rows_csv(record: RunRecord, fh) -> None:
    writer = csv.writer(fh)
    if not record.per_trial:
        writer.writerow(["trial"])
        return
    keys = list(record.per_trial[0].keys())
    writer.writerow(["trial"] + keys)
    for i, row in enumerate(record.per_trial):
        writer.writerow([i] + [_csv_cell(row[k]) for k in keys])


def _write_outputs(record: RunRecord, scenario, args) -> None:
    out_dir = Path(args.out) if args.out else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "record.json").write_text(record.to_json() + "\n")
        if args.format == "csv":
            with open(out_dir / "trials.csv", "w", newline="") as fh:
                _trial_rows_csv(record, fh)
            if (record.experiment == "grow"
                    and record.aggregate.get("strategy") == "branch"):
                # replay of trial 0: same derived stream, now with a trace
                rows = branch_growth_trace(
                    record.aggregate["p_success"],
                    record.aggregate["steps"],
                    trial_rng(record.seed, 0),
                    attempt_time=record.aggregate["attempt_time_s"])
                with open(out_dir / "trace.csv", "w", newline="") as fh:
                    write_trace_csv(rows, fh)
    if args.format == "json":
        print(record.to_json())
    else:
        _trial_rows_csv(record, sys.stdout)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        scenario = load_scenario(args.scenario)
        record = run_scenario(scenario,
                              trials=args.trials,
                              seed=args.seed,
                              dump_state=args.dump_state,
                              inject_failure=args.inject_failure)
        _write_outputs(record, scenario, args)
    except (ScenarioError, SizeLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    if record.experiment == "verify" and not record.aggregate["passed"]:
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
