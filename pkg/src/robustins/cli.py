"""Command-line entry point.

Every flag can also be set through an environment variable named
``ROBUSTINS_<FLAG>`` (for example ``ROBUSTINS_OUT`` or ``ROBUSTINS_SEED``);
explicit flags win. Errors are reported on stderr as one JSON object and the
process exits nonzero (2 for configuration errors, 1 otherwise).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .errors import ConfigError, ModelError
from .scenario import GOLDEN, calibration_rows, golden_scenarios, load_scenario, render, run, CALIBRATION_COLUMNS

ENV_PREFIX = "ROBUSTINS_"
SUBCOMMANDS = {
    "path": ("path",),
    "statics": ("statics",),
    "verify": ("verify",),
    "mc": ("mc",),
    "sweep": (),
    "run": None,
}


def _env(name, default=None):
    return os.environ.get(ENV_PREFIX + name.upper(), default)


def _seed(text):
    value = int(text, 0)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return value


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=_env("out", "out"), help="output directory")
    common.add_argument("--seed", type=_seed, default=_env("seed"), help="override the Monte Carlo seed")
    common.add_argument("--threads", type=_positive, default=_env("threads", "1"), help="worker threads")
    common.add_argument("--format", choices=("csv", "json"), default=_env("format", "csv"), dest="fmt")

    parser = argparse.ArgumentParser(prog="robustins", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cal = sub.add_parser("calibrate", parents=[common], help="ambiguity radius grid over rho and confidence")
    cal.add_argument("--n", type=_positive, default=30, help="sample size (default 30)")

    for name, help_text in (
        ("path", "equilibrium paths and regime switches"),
        ("statics", "comparative-statics report"),
        ("verify", "saddle-point grid check and HJBI residuals"),
        ("mc", "Monte Carlo value-function and worst-case checks"),
        ("sweep", "regime map over (rho, phi)"),
        ("run", "every output requested by the scenario file"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--config", default=_env("config"), required=_env("config") is None,
                       help="scenario YAML file")

    sub.add_parser("golden", parents=[common], help="run the packaged golden scenarios")
    return parser


def _error(exc: Exception, code: int) -> int:
    record = {"error": type(exc).__name__, "message": str(exc)}
    for attr in ("line", "column"):
        if getattr(exc, attr, None) is not None:
            record[attr] = getattr(exc, attr)
    print(json.dumps(record), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.seed = None if args.seed is None else _seed(str(args.seed))
        args.threads = _positive(str(args.threads))
        if args.fmt not in ("csv", "json"):
            raise ConfigError(f"unknown format {args.fmt!r}")
        out = Path(args.out)
        if args.command == "calibrate":
            text = render(CALIBRATION_COLUMNS, calibration_rows(args.n), args.fmt)
            out.mkdir(parents=True, exist_ok=True)
            (out / f"calibration.{args.fmt}").write_text(text, encoding="utf-8")
            return 0
        if args.command == "golden":
            scenarios = golden_scenarios()
            for name, scenario in zip(GOLDEN, scenarios):
                run(scenario, out / name, seed=args.seed, threads=args.threads, fmt_name=args.fmt)
            return 0
        scenario = load_scenario(args.config)
        outputs = SUBCOMMANDS[args.command]
        run(scenario, out, outputs=outputs, seed=args.seed, threads=args.threads, fmt_name=args.fmt,
            include_sweep=args.command == "sweep")
        return 0
    except (ConfigError, argparse.ArgumentTypeError, ValueError) as exc:
        if isinstance(exc, ModelError) and not isinstance(exc, ConfigError):
            return _error(exc, 1)
        return _error(exc, 2)
    except ModelError as exc:
        return _error(exc, 1)


if __name__ == "__main__":
    sys.exit(main())
