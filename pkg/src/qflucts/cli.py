"""Command-line sweep runner.

    qflucts-sweep [config.toml] [--experiment KIND] [--protocol P] [--shots N]
                  [--seed S] [--grid SPEC] [--noise K=V,...] [--exact]
                  [--out PATH] [--format csv|json] ...

Flags override values from the config file.  Exit status: 0 success,
1 configuration error, 2 a noiseless run deviates from the closed-form
results beyond tolerance, 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Sequence

from .noise import NoiseConfig
from .sweep import (FORMATS, ConfigError, RunConfig, compare_to_oracle, config_from_mapping,
                    emit_report, parse_grid, run_sweep)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

EXIT_OK, EXIT_CONFIG, EXIT_DEVIATION, EXIT_IO = 0, 1, 2, 3


def parse_noise(text: str) -> NoiseConfig:
    """``"heating=0.05,readout_flip=0.01"`` to a :class:`NoiseConfig`."""
    values = {}
    for item in filter(None, (p.strip() for p in text.split(","))):
        key, sep, val = item.partition("=")
        if not sep:
            raise ConfigError(f"noise: expected key=value, got {item!r}")
        key = key.strip()
        try:
            values[key] = int(val) if key == "quadrature_nodes" else float(val)
        except ValueError:
            raise ConfigError(f"noise: {key} must be numeric, got {val!r}") from None
    try:
        return NoiseConfig.from_mapping(values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"noise: {exc}") from None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        # bad flags are configuration errors, not argparse's default status 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: config error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="qflucts-sweep",
                description="Run a seeded temperature sweep and emit a report.")
    p.add_argument("config", nargs="?", help="TOML run configuration")
    p.add_argument("--experiment", choices=["jarzynski", "intermediate", "swap", "qmc"])
    p.add_argument("--protocol", choices=["aatpm", "tpm"])
    p.add_argument("--shots", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--grid", help='"start:stop:num" or comma-separated beta*omega values')
    p.add_argument("--noise", help='comma-separated key=value pairs, e.g. "heating=0.05"')
    p.add_argument("--exact", action="store_true", default=None,
                   help="use exact probabilities instead of shot sampling")
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--n-steps", help="comma-separated N values (intermediate experiment)")
    p.add_argument("--repetitions", type=int)
    p.add_argument("--omega1", type=float)
    p.add_argument("--omega2", type=float)
    p.add_argument("--tolerance", type=float)
    p.add_argument("--quiet", action="store_true", help="suppress the deviation summary")
    return p


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.config:
        with open(args.config, "rb") as fh:
            try:
                data = tomllib.load(fh)
            except tomllib.TOMLDecodeError as exc:
                raise ConfigError(f"config: {exc}") from None
    if args.experiment:
        data["experiment"] = args.experiment
    if "experiment" not in data:
        raise ConfigError("experiment: required (set it in the config or pass --experiment)")
    config = config_from_mapping(data)
    overrides = {k: getattr(args, k) for k in
                 ("protocol", "shots", "seed", "exact", "out", "format", "repetitions",
                  "omega1", "omega2", "tolerance") if getattr(args, k) is not None}
    if args.grid is not None:
        overrides["grid"] = parse_grid(args.grid)
    if args.noise is not None:
        overrides["noise"] = parse_noise(args.noise)
    if args.n_steps is not None:
        try:
            overrides["n_steps"] = tuple(int(v) for v in args.n_steps.split(","))
        except ValueError:
            raise ConfigError(f"n_steps: cannot parse {args.n_steps!r}") from None
    return replace(config, **overrides) if overrides else config


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"cannot read config: {exc}", file=sys.stderr)
        return EXIT_IO

    if config.out is not None and not Path(config.out).parent.is_dir():
        print(f"cannot write report: no directory for {config.out}", file=sys.stderr)
        return EXIT_IO
    report = run_sweep(config)
    try:
        text = emit_report(report, config.out, config.format)
    except OSError as exc:
        print(f"cannot write report: {exc}", file=sys.stderr)
        return EXIT_IO
    if config.out is None:
        sys.stdout.write(text)

    summary = compare_to_oracle(report, config.tolerance)
    if not args.quiet:
        for line in summary.lines():
            print(line, file=sys.stderr)
    if summary.failed:
        print(f"{summary.exceedances} cell(s) deviate beyond tolerance", file=sys.stderr)
        return EXIT_DEVIATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
