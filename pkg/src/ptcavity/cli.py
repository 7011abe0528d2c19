"""Command-line entry point.

    ptcavity simulate --config run.json --out results/ [--check] [--snapshots 10,20]
    ptcavity params --config run.json

Exit status: 0 success, 2 configuration error, 3 numerical failure,
4 a ``--check`` acceptance test failed.
"""
import argparse
import json
import logging
import sys

from .config import load_config, resolve
from .errors import ConfigError, NumericalError, UnstableCavityError
from .runner import (
    EXIT_CHECK,
    EXIT_CONFIG,
    EXIT_NUMERICAL,
    EXIT_OK,
    _json_ready,
    derived_params,
    run_experiment,
)

log = logging.getLogger("ptcavity")


def _parse_snapshots(text):
    try:
        return sorted({int(v) for v in text.split(",") if v.strip()})
    except ValueError:
        raise ConfigError(f"--snapshots expects comma-separated integers, got '{text}'") from None


def build_parser():
    parser = argparse.ArgumentParser(
        prog="ptcavity",
        description="Optical-cavity emulation of a PT-symmetric harmonic oscillator.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario and write its data files")
    sim.add_argument("--config", required=True, help="JSON configuration file")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--check", action="store_true",
                     help="evaluate the scenario's acceptance checks (exit 4 on failure)")
    sim.add_argument("--snapshots", default=None,
                     help="comma-separated round trips at which to dump the field")

    par = sub.add_parser("params", help="print the derived oscillator parameters as JSON")
    par.add_argument("--config", required=True, help="JSON configuration file")
    return parser


def _simulate(args):
    spec = load_config(args.config)
    if args.snapshots is not None:
        raw = spec.to_dict()
        raw["run"]["snapshots"] = _parse_snapshots(args.snapshots)
        spec = resolve(raw)
    log.info("scenario %s -> %s", spec.scenario, args.out)
    result = run_experiment(spec, args.out, check=args.check)
    for c in result.checks if args.check else ():
        print(f"{'PASS' if c['passed'] else 'FAIL'} {c['name']}: {c['value']!r} (target {c['target']})")
    return result.status


def _params(args):
    spec = load_config(args.config)
    json.dump(_json_ready(derived_params(spec.cavity)), sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "simulate":
            return _simulate(args)
        return _params(args)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except UnstableCavityError as err:
        print(f"config error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


__all__ = ["main", "build_parser", "EXIT_CHECK"]

if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
