"""Command-line entry point.

    hermite-rolle run --function exp-sin --nodes 0,4.71238898038469 \\
        --degrees 5,7,9,11 --spline --out results/

Settings may also come from a flat ``key = value`` file given with
``--config``; flags on the command line win.  Exit codes: 0 success,
2 configuration error, 3 numerical-stage error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import fields

from .errors import ConfigError, RolleError
from .experiment import ExperimentConfig, StageError, report_lines, run_experiment

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 2, 3


def _floats(s: str) -> tuple:
    return tuple(float(v) for v in s.split(",") if v.strip())


def _ints(s: str) -> tuple:
    return tuple(int(v) for v in s.split(",") if v.strip())


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _optional(conv):
    return lambda s: None if s.strip() in ("", "none", "None") else conv(s)


PARSERS = {
    "function": str,
    "nodes": _floats,
    "xz_offset": float,
    "samples": int,
    "steps": _optional(int),
    "margin": _optional(float),
    "grid": int,
    "degrees": _ints,
    "spline": _bool,
    "out": _optional(str),
}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        try:
            out[key] = PARSERS[key](val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {exc}") from None
    return out


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hermite-rolle", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the Rolle-function pipeline")
    r.add_argument("--config", help="flat key = value settings file")
    r.add_argument("--function", help="registered target function (default exp-sin)")
    r.add_argument("--nodes", type=_floats, help="comma-separated increasing nodes")
    r.add_argument("--xz-offset", type=float, help="bootstrap point offset from x_0")
    r.add_argument("--samples", type=int, help="RK values on the (x_n-x_0)/samples grid")
    r.add_argument("--steps", type=int, help="explicit RK step count (margin mode)")
    r.add_argument("--margin", type=float, help="stop this far before x_n (margin mode)")
    r.add_argument("--grid", type=int, help="bootstrap scan points")
    r.add_argument("--degrees", type=_ints, help="least-squares degrees, e.g. 5,7,9,11")
    r.add_argument("--spline", dest="spline", action="store_true", default=None)
    r.add_argument("--no-spline", dest="spline", action="store_false")
    r.add_argument("--out", help="output directory")
    r.add_argument("-v", "--verbose", action="store_true")
    return p


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values = {}
    if args.config:
        try:
            with open(args.config) as fh:
                values.update(parse_config_text(fh.read()))
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
    for fl in fields(ExperimentConfig):
        v = getattr(args, fl.name, None)
        if v is not None:
            values[fl.name] = v
    return ExperimentConfig(**values)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = config_from_args(args)
        rep = run_experiment(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StageError as exc:
        if isinstance(exc.cause, ConfigError):
            print(f"config error: {exc.cause}", file=sys.stderr)
            return EXIT_CONFIG
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except RolleError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print("\n".join(report_lines(rep)))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
