"""Command-line front end.

Exit codes: 0 success, 1 config error, 2 invariant violation, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings

from .errors import (ConfigError, DimensionOverflow, EigenFailure, NotADensityMatrix,
                     ParameterError, PreconditionViolation, StepSizeUnderflow, UnknownFigure)
from .model import InitialQubitState, ModelParams
from .scenarios import (FIGURE_PRESETS, METHOD_CHOICES, ScenarioConfig, load_config, parse_sweep,
                        run, _json_default)

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_NUMERICAL = 0, 1, 2, 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="xxzbath",
        description="Concurrence dynamics of a two-qubit XXZ chain with DM interaction "
                    "coupled to a single-mode thermal bath.")
    ap.add_argument("--figure", choices=sorted(FIGURE_PRESETS), help="start from a figure preset")
    ap.add_argument("--config", help="JSON config file (overrides the preset)")
    ap.add_argument("--method", choices=METHOD_CHOICES)
    ap.add_argument("--out", help="output directory for CSV files and the summary")
    ap.add_argument("--tmax", type=float)
    ap.add_argument("--steps", type=int)
    ap.add_argument("--tail-epsilon", type=float)
    ap.add_argument("--sweep", help="field=v1,v2,... (a ModelParams field or chi)")
    ap.add_argument("--jobs", type=int, default=1, help="sweep points computed concurrently")
    ap.add_argument("--quiet", action="store_true", help="do not print the summary JSON")
    return ap


def resolve_config(args) -> ScenarioConfig:
    if args.figure:
        config = FIGURE_PRESETS[args.figure]()
    else:
        config = ScenarioConfig(params=ModelParams(), init=InitialQubitState.bell())
    if args.config:
        config = load_config(args.config, base=config)
    changes = {}
    if args.method:
        changes["method"] = args.method
    if args.out:
        changes["output_path"] = args.out
    if args.tmax is not None:
        changes["t_max"] = args.tmax
    if args.steps is not None:
        changes["steps"] = args.steps
    if args.tail_epsilon is not None:
        changes["tail_epsilon"] = args.tail_epsilon
    if args.sweep:
        changes["sweep"] = parse_sweep(args.sweep)
    return config.replace(**changes) if changes else config


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
    except (ConfigError, ParameterError, UnknownFigure, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.jobs < 1:
        print("config error: --jobs must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            report = run(config, jobs=args.jobs)
    except (ParameterError, PreconditionViolation, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NotADensityMatrix as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except (StepSizeUnderflow, EigenFailure, DimensionOverflow) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if not args.quiet:
        print(json.dumps(report.summary, indent=2, default=_json_default))
    for v in report.summary["violations"]:
        print(f"invariant violation: {v}", file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
