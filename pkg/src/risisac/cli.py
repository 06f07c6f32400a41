"""Command-line experiment runner.

    risisac power-sweep --p-dbm 0 5 10 --trials 10 --out power.csv
    risisac ris-sweep --n 16 36 64 --trials 10 --out ris.csv
    risisac beampattern --out pattern.csv
    risisac default-config > config.json

Failures exit with status 1 and a single JSON line on stderr.
"""

from __future__ import annotations

import argparse
import json
import sys

from .experiments import (
    PATTERN_SCHEMES,
    RATE_SCHEMES,
    ExperimentSpec,
    run_beampattern,
    run_power_sweep,
    run_ris_size_sweep,
)
from .scenario import SystemConfig


def _schemes(text):
    return tuple(s.strip() for s in text.split(",") if s.strip())


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ValueError(message)


def _parser():
    p = _Parser(prog="risisac", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, schemes, trials=10):
        sp.add_argument("--config", help="JSON file with SystemConfig fields")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--trials", type=int, default=trials)
        sp.add_argument("--out", required=True, help="CSV output path")
        sp.add_argument("--schemes", type=_schemes, default=schemes, help="comma-separated list")
        sp.add_argument("--workers", type=int, default=1)
        sp.add_argument("--epsilon", type=float, help="beampattern MSE level (default: ratio x radar-only floor)")

    sp = sub.add_parser("power-sweep", help="sum-rate versus transmit power")
    common(sp, RATE_SCHEMES)
    sp.add_argument("--p-dbm", type=float, nargs="+", default=[0.0, 5.0, 10.0, 15.0, 20.0])
    sp.add_argument("--n", type=int, help="RIS elements")

    sp = sub.add_parser("ris-sweep", help="sum-rate versus number of RIS elements")
    common(sp, RATE_SCHEMES)
    sp.add_argument("--n", type=int, nargs="+", default=[16, 36, 64])
    sp.add_argument("--p-dbm", type=float)

    sp = sub.add_parser("beampattern", help="designed transmit beampatterns for one channel draw")
    common(sp, ("proposed", "no_ris", "radar_only"), trials=1)
    sp.add_argument("--n", type=int)
    sp.add_argument("--p-dbm", type=float)

    sub.add_parser("default-config", help="print the default configuration as JSON")
    return p


def _base_config(args) -> SystemConfig:
    cfg = SystemConfig.load(args.config) if args.config else SystemConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.epsilon is not None:
        changes["epsilon"] = args.epsilon
    if args.command != "power-sweep" and args.p_dbm is not None:
        changes["P_dbm"] = args.p_dbm
    if args.command != "ris-sweep" and args.n is not None:
        changes["N"] = args.n
    return cfg.replace(**changes) if changes else cfg


def run(argv=None) -> int:
    args = _parser().parse_args(argv)
    if args.command == "default-config":
        print(json.dumps(SystemConfig().to_dict(), indent=2))
        return 0
    base = _base_config(args)
    if args.command == "power-sweep":
        spec = ExperimentSpec("power_sweep", sorted(args.p_dbm), args.trials, args.schemes, args.out, base, args.workers)
        run_power_sweep(spec)
    elif args.command == "ris-sweep":
        spec = ExperimentSpec("ris_size_sweep", sorted(args.n), args.trials, args.schemes, args.out, base, args.workers)
        run_ris_size_sweep(spec)
    else:
        bad = [s for s in args.schemes if s not in PATTERN_SCHEMES]
        if bad:
            raise ValueError(f"unsupported schemes {bad}")
        spec = ExperimentSpec("beampattern", [], 1, args.schemes, args.out, base, args.workers)
        run_beampattern(spec)
    return 0


def main(argv=None):
    try:
        code = run(argv)
    except Exception as exc:  # reported as one machine-readable line
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
