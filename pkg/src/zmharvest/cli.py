"""Command-line driver: ``zmharvest {point,sweep,validate,oracle}``.

Exit status: 0 on success, 1 for configuration errors, 2 when at least one
point failed numerically (or, for ``oracle``, deviated beyond tolerance).
"""
from __future__ import annotations

import argparse
import json
import sys

from . import sweep
from .config import validate
from .errors import NUMERICAL_ERRORS, ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2
ORACLE_TOL = 1e-6


def _read_params(args) -> dict:
    raw = {}
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            raw.update(sweep.parse_flat(fh.read()))
    for item in args.set or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError([("MalformedConfig", f"--set expects key=value, got {item!r}")])
        raw[key.strip()] = value.strip()
    # an explicit separation on the command line overrides the file's other form
    if args.set:
        keys = {i.partition("=")[0].strip() for i in args.set}
        if "separation_abs" in keys and "separation_fraction" not in keys:
            raw.pop("separation_fraction", None)
        if "separation_fraction" in keys and "separation_abs" not in keys:
            raw.pop("separation_abs", None)
    return raw


def _emit(text, path):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _render(rows, fmt):
    return sweep.to_json(rows) if fmt == "json" else sweep.to_csv(rows)


def cmd_validate(args):
    cfg = validate(sweep.config_from_flat(_read_params(args)))
    _emit(json.dumps(sweep.config_to_flat(cfg), indent=2) + "\n", args.output)
    return EXIT_OK


def cmd_point(args):
    cfg = validate(sweep.config_from_flat(_read_params(args)))
    rows = [sweep.run_point(cfg)]
    _emit(_render(rows, args.format), args.output)
    return EXIT_NUMERICAL if sweep.has_numerical_failure(rows) else EXIT_OK


def cmd_sweep(args):
    spec = sweep.SweepSpec(axis=args.axis, lo=args.lo, hi=args.hi, count=args.count,
                           spacing=args.spacing, base=_read_params(args))
    rows = sweep.run_sweep(spec, workers=args.workers)
    _emit(_render(rows, args.format), args.output)
    return EXIT_NUMERICAL if sweep.has_numerical_failure(rows) else EXIT_OK


def cmd_oracle(args):
    from . import oracle

    cfg = validate(sweep.config_from_flat(_read_params(args)))
    try:
        checks = oracle.cross_check(cfg)
    except NUMERICAL_ERRORS as exc:
        print(f"oracle failed: {exc.code}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    lines = []
    for name, prod, ref, dev in checks:
        lines.append(f"{name:22s} production {prod.real: .15e} {prod.imag:+.15e}j  "
                     f"oracle {ref.real: .15e} {ref.imag:+.15e}j  dev {dev:.2e}")
    worst = max(c[3] for c in checks)
    lines.append(f"max deviation {worst:.3e} (tolerance {ORACLE_TOL:g})")
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK if worst <= ORACLE_TOL else EXIT_NUMERICAL


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-c", "--config", help="flat key = value configuration file")
    common.add_argument("-s", "--set", action="append", metavar="KEY=VALUE",
                        help="override one configuration key (repeatable)")
    common.add_argument("-o", "--output", help="output path (default: stdout)")

    p = argparse.ArgumentParser(prog="zmharvest", description=(
        "Entanglement harvesting with and without the zero mode on the 1+1D cylinder. "
        "Keys: " + ", ".join(sweep.FLAT_KEYS)))
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("point", parents=[common], help="evaluate a single configuration")
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.set_defaults(func=cmd_point)

    sw = sub.add_parser("sweep", parents=[common], help="sweep one parameter")
    sw.add_argument("--axis", required=True, choices=sorted(sweep.AXES))
    sw.add_argument("--lo", type=float, required=True)
    sw.add_argument("--hi", type=float, required=True)
    sw.add_argument("--count", type=int, required=True)
    sw.add_argument("--spacing", choices=("linear", "log"), default=None,
                    help="default: log for gamma, linear otherwise")
    sw.add_argument("--format", choices=("csv", "json"), default="csv")
    sw.add_argument("--workers", type=int, default=1)
    sw.set_defaults(func=cmd_sweep)

    va = sub.add_parser("validate", parents=[common], help="check and normalize a configuration")
    va.set_defaults(func=cmd_validate)

    orc = sub.add_parser("oracle", parents=[common],
                         help="compare production values with brute-force quadrature")
    orc.set_defaults(func=cmd_oracle)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "spacing", "unset") is None:
        args.spacing = "log" if args.axis == "gamma" else "linear"
    try:
        return args.func(args)
    except ConfigError as exc:
        for code, msg in exc.issues:
            print(f"config error [{code}]: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
