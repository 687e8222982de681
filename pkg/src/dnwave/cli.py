"""Command-line interface.

Exit codes: 0 pass, 1 checked-and-failed, 2 usage or validation error,
3 inconclusive.  Data goes to stdout (or ``--out``); diagnostics go to
stderr.  Set DNWAVE_LOG to a logging level name to change verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import lame, stability
from .errors import DegenerateModulus, DomainError, InadmissibleParameters
from .report import csv_table, dumps
from .selftest import run_all
from .wavefamily import DEFAULT_ALPHA, DEFAULT_C, DEFAULT_N, DEFAULT_OMEGA, build_wave, quartic_roots, residuals

log = logging.getLogger("dnwave")

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3
VERDICT_EXIT = {"stable": EXIT_OK, "unstable": EXIT_FAIL, "inconclusive": EXIT_INCONCLUSIVE}

DEFAULTS = {
    "c": None,
    "omega": None,
    "alpha": None,
    "kappa": None,
    "N": DEFAULT_N,
    "tol_stab": stability.Tolerances.stab,
    "tol_pos": stability.Tolerances.pos,
    "format": "json",
    "out": None,
    "force": False,
    "parallel": 1,
    "verbose": False,
    "seed": 0,
}
FIGURE1_RANGE = "0.05:0.95:91"
SWEEP_KAPPA_RANGE = "0.1:0.9:9"
WAVE_RESIDUAL_TOL = 1e-9


class UsageError(Exception):
    pass


def parse_range(text) -> list[float]:
    """Parse ``x`` or ``start:stop:count`` into a list of floats (endpoints included)."""
    if isinstance(text, (int, float)):
        return [float(text)]
    parts = str(text).split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0])]
        if len(parts) == 3:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1:
                raise UsageError(f"range count must be >= 1 in {text!r}")
            if count == 1:
                return [start]
            return [float(v) for v in np.linspace(start, stop, count)]
    except ValueError as exc:
        raise UsageError(f"cannot parse {text!r} as a number or start:stop:count range") from exc
    raise UsageError(f"cannot parse {text!r} as a number or start:stop:count range")


def _scalar(config, name, default):
    value = config.get(name)
    if value is None:
        return default
    values = parse_range(value)
    if len(values) != 1:
        raise UsageError(f"--{name} takes a single value for this command")
    return values[0]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters")
    for name in ("c", "omega", "alpha", "kappa"):
        g.add_argument(f"--{name}", default=None, help="value or start:stop:count")
    g.add_argument("--N", type=int, default=None, help=f"grid points (default {DEFAULT_N})")
    g.add_argument("--tol-stab", dest="tol_stab", type=float, default=None)
    g.add_argument("--tol-pos", dest="tol_pos", type=float, default=None)
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=("json", "csv"), default=None)
    o.add_argument("--out", default=None, help="write data here instead of stdout")
    o.add_argument("--force", action="store_true", default=None, help="overwrite --out")
    o.add_argument("--parallel", type=int, default=None, help="worker processes for sweep")
    o.add_argument("--config", default=None, help="JSON file of option defaults")
    o.add_argument("--verbose", action="store_true", default=None)
    o.add_argument("--seed", type=int, default=None)

    parser = argparse.ArgumentParser(prog="dnwave", description="Dnoidal wave spectral verification")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("wave", parents=[common], help="construct a wave and report its residuals")
    check = sub.add_parser("check", parents=[common], help="run every spectral check for one wave")
    check.add_argument("--break-symmetry", dest="break_symmetry", action="store_true", help=argparse.SUPPRESS)
    sub.add_parser("figure1", parents=[common], help="closed form vs numeric <Q^-1 dn^2, dn^2> over kappa")
    sub.add_parser("sweep", parents=[common], help="stability verdicts over a parameter grid")
    sub.add_parser("selftest", parents=[common], help="elliptic, differentiation and integral-table battery")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    """Merge flags over the --config file over built-in defaults."""
    config = dict(DEFAULTS)
    if args.config:
        try:
            with open(args.config) as fh:
                data = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config file {args.config!r}: {exc}") from exc
        unknown = set(data) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        config.update({k: v for k, v in data.items() if v is not None})
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    config["command"] = args.command
    config["break_symmetry"] = bool(getattr(args, "break_symmetry", False))
    return config


def _tolerances(config) -> stability.Tolerances:
    return stability.Tolerances(stab=float(config["tol_stab"]), pos=float(config["tol_pos"]))


def _emit(config, text: str) -> None:
    out = config["out"]
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)


def _check_out(config) -> None:
    out = config["out"]
    if out is not None and Path(out).exists() and not config["force"]:
        raise UsageError(f"output file {out!r} exists; pass --force to overwrite")


def _point(config):
    c = _scalar(config, "c", DEFAULT_C)
    omega = _scalar(config, "omega", DEFAULT_OMEGA)
    alpha = _scalar(config, "alpha", DEFAULT_ALPHA)
    kappa = _scalar(config, "kappa", 0.5)
    return c, omega, alpha, kappa


def cmd_wave(config) -> int:
    c, omega, alpha, kappa = _point(config)
    wave = build_wave(c, omega, alpha, kappa, int(config["N"]))
    r1, r2 = residuals(wave)
    r1_rel = r1 / float(np.max(np.abs(wave.phi)))
    r2_rel = r2 / float(np.max(np.abs(wave.psi)))
    roots = quartic_roots(wave.params)
    ok = r1_rel <= WAVE_RESIDUAL_TOL and r2_rel <= WAVE_RESIDUAL_TOL
    if config["format"] == "csv":
        row = dict(wave.params.to_dict(), N=wave.grid.N, r1=r1, r2=r2, r1_rel=r1_rel, r2_rel=r2_rel)
        _emit(config, csv_table([row]))
    else:
        data = wave.to_dict(include_profiles=bool(config["verbose"]))
        data["residuals"] = {"r1": r1, "r2": r2, "r1_rel": r1_rel, "r2_rel": r2_rel, "tol": WAVE_RESIDUAL_TOL}
        data["quartic_roots"] = {"phi0": roots.phi0, "phi1": roots.phi1, "a": roots.a}
        _emit(config, dumps(data))
    return EXIT_OK if ok else EXIT_FAIL


SWEEP_COLUMNS = [
    "c",
    "omega",
    "alpha",
    "kappa",
    "N",
    "min_eig_H",
    "maxReJH",
    "es2_value_variant_a",
    "es2_value_variant_b",
    "weinstein_L",
    "weinstein_Q",
    "weinstein_ones",
    "verdict",
]


def cmd_check(config) -> int:
    c, omega, alpha, kappa = _point(config)
    wave = build_wave(c, omega, alpha, kappa, int(config["N"]))
    report = stability.verdict(wave, tols=_tolerances(config), symmetry_broken=config["break_symmetry"])
    if config["format"] == "csv":
        _emit(config, csv_table([report.scalars()], SWEEP_COLUMNS))
    else:
        _emit(config, dumps(report.to_dict()))
    log.info("verdict: %s", report.verdict)
    return VERDICT_EXIT[report.verdict]


def cmd_figure1(config) -> int:
    kappas = parse_range(config["kappa"] if config["kappa"] is not None else FIGURE1_RANGE)
    lo, hi = lame.ES2_KAPPA_RANGE
    bad = [k for k in kappas if not lo <= k <= hi]
    if bad:
        raise UsageError(f"kappa values {bad} fall outside [{lo}, {hi}]")
    points = [lame.es2_point(k, int(config["N"])) for k in kappas]
    match = lame.matching_variant(points)
    log.info("closed-form variant matching the numeric oracle to 1e-6: %s", match or "none")
    rows = [p.to_dict() for p in points]
    if config["format"] == "csv":
        _emit(config, csv_table(rows, ["kappa", "es2_variant_a", "es2_variant_b", "numeric_oracle"]))
    else:
        _emit(config, dumps({"rows": rows, "matching_variant": match, "rtol": 1e-6}))
    return EXIT_OK if all(p.numeric < 0 for p in points) else EXIT_FAIL


def cmd_sweep(config) -> int:
    kappas = parse_range(config["kappa"] if config["kappa"] is not None else SWEEP_KAPPA_RANGE)
    tols = _tolerances(config)
    if all(config[k] is None for k in ("c", "omega", "alpha")):
        points, skipped = [], []
        for pt in stability.default_points(kappas):
            ok, bad = stability.admissible_points(*([v] for v in pt))
            points += ok
            skipped += bad
    else:
        c = parse_range(config["c"] if config["c"] is not None else DEFAULT_C)
        omega = parse_range(config["omega"] if config["omega"] is not None else DEFAULT_OMEGA)
        alpha = parse_range(config["alpha"] if config["alpha"] is not None else DEFAULT_ALPHA)
        points, skipped = stability.admissible_points(c, omega, alpha, kappas)
    result = stability.sweep(None, None, None, None, int(config["N"]), tols, int(config["parallel"]), points=points)
    if config["format"] == "csv":
        _emit(config, csv_table([r.scalars() for r in result.rows], SWEEP_COLUMNS))
    else:
        data = {
            "rows": [r.to_dict() for r in result.rows],
            "skipped": [{"point": list(pt), "reason": reason} for pt, reason in skipped],
        }
        _emit(config, dumps(data))
    verdicts = [r.verdict for r in result.rows]
    if "unstable" in verdicts:
        return EXIT_FAIL
    if "inconclusive" in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def cmd_selftest(config) -> int:
    checks = run_all(seed=int(config["seed"]))
    failed = [c for c in checks if not c.passed]
    data = {"passed": not failed, "n_checks": len(checks), "failed": [c.name for c in failed]}
    if config["verbose"]:
        data["checks"] = [c.to_dict() for c in checks]
    _emit(config, dumps(data))
    for c in failed:
        print(f"FAILED {c.name}: {c.value!r} {c.relation} {c.threshold!r} does not hold", file=sys.stderr)
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {
    "wave": cmd_wave,
    "check": cmd_check,
    "figure1": cmd_figure1,
    "sweep": cmd_sweep,
    "selftest": cmd_selftest,
}


def main(argv=None) -> int:
    logging.basicConfig(
        level=os.environ.get("DNWAVE_LOG", "WARNING").upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        config = resolve_config(args)
        if config["format"] not in ("json", "csv"):
            raise UsageError(f"unknown format {config['format']!r}")
        _check_out(config)
        return COMMANDS[config["command"]](config)
    except (UsageError, InadmissibleParameters, DegenerateModulus, DomainError) as exc:
        print(f"dnwave {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
