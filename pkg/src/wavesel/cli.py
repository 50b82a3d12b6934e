"""Command-line front end for the spectrum-sharing experiments.

Subcommands: run, sweep-p12, sweep-joint, sweep-miss, short-horizon,
dominance.  Exit codes: 0 success, 2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .channel import ChannelError, ConvergenceError
from .harness import (
    ConfigError,
    ExperimentConfig,
    parse_grid,
    run_dominance,
    run_episode,
    run_trials,
    short_horizon,
    sweep_joint,
    sweep_miss,
    sweep_p12,
    write_regret_csv,
    write_rows_csv,
    write_rows_json,
    write_trace,
    SweepRow,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


def _add_shared_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, help="JSON config / channel spec file")
    parser.add_argument("--d", type=int, help="number of sub-bands")
    parser.add_argument("--n", type=int, help="horizon in PRIs")
    parser.add_argument("--trials", type=int, help="independent trials")
    parser.add_argument("--eta", type=float, help="missed-opportunity weight")
    parser.add_argument("--p-miss", type=float, dest="p_miss", help="sensing miss probability")
    parser.add_argument("--p12", type=float, help="state 1 -> 2 switching probability")
    parser.add_argument("--p21", type=float, help="state 2 -> 1 switching probability")
    parser.add_argument("--seed", type=int, help="master seed")
    parser.add_argument(
        "--policies",
        type=str,
        help="comma-separated policy names (saa,ts,bellman,genie,fixed:<s>:<w>)",
    )
    parser.add_argument("--grid", type=str, help="sweep grid as start:stop:step")
    parser.add_argument("--ts-prior", type=float, dest="ts_prior", help="TS prior precision")
    parser.add_argument("--ts-noise", type=float, dest="ts_noise", help="TS noise variance")
    parser.add_argument("--workers", type=int, help="parallel trial workers")
    parser.add_argument("--out", type=Path, help="output path (default stdout)")
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv", help="output format"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wavesel",
        description="Simulate adaptive radar waveform selection in Markov interference channels.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="single-point experiment")
    _add_shared_flags(run_p)
    run_p.add_argument(
        "--regret-out", type=Path, help="write mean cumulative regret curves (CSV)"
    )
    run_p.add_argument(
        "--trace-out", type=Path, help="write the first trial's per-PRI trace"
    )

    for name, help_text in (
        ("sweep-p12", "vary p12 with p21 fixed"),
        ("sweep-joint", "vary p12 = p21 jointly"),
        ("sweep-miss", "vary the sensing miss probability"),
        ("short-horizon", "joint sweep at a short horizon (default n=300)"),
    ):
        p = sub.add_parser(name, help=help_text)
        _add_shared_flags(p)

    dom = sub.add_parser("dominance", help="stochastic-dominance report for a policy pair")
    _add_shared_flags(dom)
    return parser


_OVERRIDABLE = (
    "d",
    "n",
    "trials",
    "eta",
    "p_miss",
    "p12",
    "p21",
    "seed",
    "ts_prior",
    "ts_noise",
    "workers",
)


def _config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is not None:
        if not args.config.exists():
            raise ConfigError(f"config file not found: {args.config}")
        config = ExperimentConfig.from_file(args.config)
    else:
        config = ExperimentConfig()
    overrides = {
        name: getattr(args, name)
        for name in _OVERRIDABLE
        if getattr(args, name, None) is not None
    }
    if args.policies is not None:
        overrides["policies"] = tuple(
            p.strip() for p in args.policies.split(",") if p.strip()
        )
    if overrides.get("d") is not None and config.states is not None:
        if overrides["d"] != config.d:
            raise ConfigError("--d cannot override an explicit channel state list")
    config = replace(config, **overrides)
    return config.validate()


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(text, encoding="utf-8")


def _grid_or_default(args: argparse.Namespace, default: str) -> list[float]:
    return parse_grid(args.grid if args.grid else default)


def _dispatch(args: argparse.Namespace) -> int:
    command = args.command
    if command == "run":
        config = _config_from_args(args)
        stats = run_trials(config, collect_regret_curves=args.regret_out is not None)
        rows = [SweepRow.from_stats("run", config, stats[p]) for p in config.policies]
        text = (
            write_rows_csv(rows, "run", config)
            if args.format == "csv"
            else write_rows_json(rows, "run", config)
        )
        _emit(text, args.out)
        if args.regret_out is not None:
            curves = {p: stats[p].per_trial["curve"] for p in config.policies}
            _emit(write_regret_csv(curves, "run", config), args.regret_out)
        if args.trace_out is not None:
            fmt = "json" if args.trace_out.suffix == ".json" else "csv"
            chunks = [
                write_trace(run_episode(config, p, 0), config, fmt=fmt)
                for p in config.policies
            ]
            if fmt == "csv" and len(chunks) > 1:
                # Keep a single header block when concatenating policies.
                head, *rest = chunks
                body = [head] + [
                    "\n".join(c.splitlines()[4:]) + "\n" for c in rest
                ]
                _emit("".join(body), args.trace_out)
            else:
                _emit("\n".join(chunks) if fmt == "json" else chunks[0], args.trace_out)
        return EXIT_OK

    if command in ("sweep-p12", "sweep-joint", "sweep-miss", "short-horizon"):
        config = _config_from_args(args)
        if command == "sweep-p12":
            rows = sweep_p12(config, _grid_or_default(args, "0:1:0.05"))
        elif command == "sweep-joint":
            rows = sweep_joint(config, _grid_or_default(args, "0:1:0.05"))
        elif command == "sweep-miss":
            rows = sweep_miss(config, _grid_or_default(args, "0:0.5:0.1"))
        else:
            if args.n is None:
                config = replace(config, n=300)
            rows = short_horizon(config, _grid_or_default(args, "0:1:0.05"))
        text = (
            write_rows_csv(rows, command, config)
            if args.format == "csv"
            else write_rows_json(rows, command, config)
        )
        _emit(text, args.out)
        return EXIT_OK

    if command == "dominance":
        config = _config_from_args(args)
        if len(config.policies) != 2:
            raise ConfigError(
                f"dominance needs exactly two policies, got {len(config.policies)}"
            )
        report = run_dominance(config, (config.policies[0], config.policies[1]))
        _emit(json.dumps(report, sort_keys=True, indent=2) + "\n", args.out)
        return EXIT_OK

    raise ConfigError(f"unknown command {command!r}")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except (ConfigError, ChannelError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConvergenceError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
