"""Command-line front end.

Subcommands: ``validate``, ``quantize``, ``compare``, ``numdist``, ``unruh``.
Options may also come from an INI-style config file (``--config``), one section
per subcommand with ``key = value`` lines; command-line flags win. Exit codes:
0 success, 1 usage error, 2 invariant failure, 3 convergence failure. Errors
are also written to stderr as one JSON record per line.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys

import numpy as np

from . import io as tables
from .errors import ConvergenceError, DimensionError, InvariantError
from .gaussian import (
    FockVacuumState,
    alien_number_distribution,
    alien_number_variance,
    equivalence_verdict,
    mean_alien_number,
    total_mean_alien_number,
)
from .models import LatticeKGModel, minkowski_structure, unruh_spectrum
from .phase_space import (
    DynamicsGenerator,
    VALIDATION_TOL,
    j_from_dynamics,
    make_standard_phase_space,
    validate_complex_structure,
)

COMMANDS = ("validate", "quantize", "compare", "numdist", "unruh")
EXIT_OK, EXIT_USAGE, EXIT_INVARIANT, EXIT_CONVERGENCE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(kind):
    def conv(text):
        try:
            value = kind(text)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"not a valid {kind.__name__}: {text!r}") from exc
        if not value > 0 or (isinstance(value, float) and not math.isfinite(value)):
            raise argparse.ArgumentTypeError(f"must be positive and finite, got {text!r}")
        return value

    conv.__name__ = kind.__name__
    return conv


def _common(p):
    p.add_argument("--config", metavar="PATH", help="INI config file; section named after the subcommand")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=None, help="output format (default: csv)")
    p.add_argument("--tol", type=_positive(float), default=None,
                   help=f"validation tolerance, dimensionless (default: {VALIDATION_TOL:g})")


def _pair_flags(p, required=True):
    p.add_argument("--omega1", type=_positive(float), action="append", metavar="W",
                   help="frequency of each mode for the first quantization, 1/time (repeat per mode)")
    p.add_argument("--omega2", type=_positive(float), action="append", metavar="W",
                   help="frequency of each mode for the second quantization, 1/time (repeat per mode)")


def _model_flags(p):
    p.add_argument("--sites", type=_positive(int), default=None, help="number of lattice sites L (>= 8; default for unruh: 256)")
    p.add_argument("--spacing", type=_positive(float), default=None, help="lattice spacing delta, length units")
    p.add_argument("--mass", type=_positive(float), default=None, help="field mass m > 0, inverse length")
    p.add_argument("--wedge-origin", type=int, default=None, help="boost-center site index (default: L // 2)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="alienquanta", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("validate", help="check the complex-structure axioms for a named J")
    p.add_argument("--J", dest="J", choices=("standard", "flipped", "identity", "oscillator"),
                   default=None, help="which operator to check; 'oscillator' uses --omega1 (default: standard)")
    p.add_argument("--n", type=_positive(int), default=None, help="number of modes, dimensionless (default: 1)")
    _pair_flags(p)
    _common(p)

    p = sub.add_parser("quantize", help="derive J from a positive-energy flow and print it")
    _pair_flags(p)
    _model_flags(p)
    _common(p)

    p = sub.add_parser("compare", help="alien-quanta content of omega1-vacuum relative to omega2 modes")
    _pair_flags(p)
    _common(p)

    p = sub.add_parser("numdist", help="number distribution of one omega2 mode in the omega1 vacuum")
    _pair_flags(p)
    p.add_argument("--mode", type=int, default=None, help="mode index counted (default: 0)")
    p.add_argument("--nmax", type=_positive(int), default=None, help="largest number of quanta reported (default: 10)")
    p.add_argument("--cutoff", type=_positive(int), default=None,
                   help="largest Fock cutoff tried, quanta per mode (default: 512)")
    _common(p)

    p = sub.add_parser("unruh", help="boost-mode occupations of the restricted lattice vacuum")
    _model_flags(p)
    p.add_argument("--wedge", choices=("right", "left"), default=None, help="which wedge (default: right)")
    _common(p)
    return parser


DEFAULTS = {
    "format": "csv",
    "J": "standard",
    "n": 1,
    "mode": 0,
    "nmax": 10,
    "cutoff": 512,
    "spacing": 1.0,
    "mass": 0.05,
    "wedge": "right",
    "tol": VALIDATION_TOL,
}

# the lattice size defaults only where a lattice is the sole input
COMMAND_DEFAULTS = {"unruh": {"sites": 256}}

LIST_KEYS = ("omega1", "omega2")


def _apply_config(parser, args, argv):
    if not args.config:
        return
    cp = configparser.ConfigParser()
    try:
        with open(args.config, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from exc
    unknown_sections = [s for s in cp.sections() if s not in COMMANDS]
    if unknown_sections:
        raise UsageError(f"unknown config sections: {', '.join(unknown_sections)}")
    if not cp.has_section(args.command):
        return
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config")}
    for key, raw in cp.items(args.command):
        dest = key.replace("-", "_")
        if dest not in actions:
            raise UsageError(f"unknown config key {key!r} in [{args.command}]")
        if getattr(args, dest) is not None:
            continue  # flag given on the command line
        action = actions[dest]
        items = raw.split(",") if dest in LIST_KEYS else [raw]
        try:
            values = [action.type(v.strip()) if action.type else v.strip() for v in items]
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"config key {key!r}: {exc}") from exc
        if action.choices is not None and any(v not in action.choices for v in values):
            raise UsageError(f"config key {key!r}: must be one of {sorted(action.choices)}")
        setattr(args, dest, values if dest in LIST_KEYS else values[0])


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    _apply_config(parser, args, argv)
    for key, value in {**DEFAULTS, **COMMAND_DEFAULTS.get(args.command, {})}.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    return args


def _oscillators(omegas):
    """Uncoupled oscillators ``q'' = -w^2 q`` on the interleaved standard space."""
    n = len(omegas)
    S = make_standard_phase_space(n)
    A = np.zeros((2 * n, 2 * n))
    for i, w in enumerate(omegas):
        A[2 * i, 2 * i + 1] = 1.0
        A[2 * i + 1, 2 * i] = -w * w
    return DynamicsGenerator(S, A, "oscillators")


def _require_pair(args):
    if not args.omega1 or not args.omega2:
        raise UsageError("need --omega1 and --omega2")
    if len(args.omega1) != len(args.omega2):
        raise UsageError("--omega1 and --omega2 must list the same number of modes")


def _model(args):
    return LatticeKGModel(args.sites, args.spacing, args.mass, args.wedge_origin)


def cmd_validate(args):
    if args.J == "oscillator":
        if not args.omega1:
            raise UsageError("--J oscillator needs --omega1")
        dyn = _oscillators(args.omega1)
        S, J = dyn.space, j_from_dynamics(dyn, args.tol).op
    else:
        S = make_standard_phase_space(args.n)
        J = {
            "standard": np.linalg.inv(S.form),
            "flipped": S.form.copy(),
            "identity": np.eye(S.dim),
        }[args.J]
    report = validate_complex_structure(S, J, args.tol)
    records = report.as_records()
    if not report.passed:
        return records, InvariantError(f"{args.J} is not a complex structure", check=report.failing[0])
    return records, None


def cmd_quantize(args):
    if args.sites is not None:
        J = minkowski_structure(_model(args))
    elif args.omega1:
        J = j_from_dynamics(_oscillators(args.omega1), args.tol)
    else:
        raise UsageError("need --omega1 (oscillators) or --sites (lattice)")
    mu = J.gram
    n = J.dim
    return [
        {"row": i, "col": j, "J": float(J.op[i, j]), "mu": float(mu[i, j])}
        for i in range(n)
        for j in range(n)
    ], None


def cmd_compare(args):
    _require_pair(args)
    J1 = j_from_dynamics(_oscillators(args.omega1), args.tol)
    J2 = j_from_dynamics(_oscillators(args.omega2), args.tol)
    report = equivalence_verdict(J1, J2, tol=args.tol)
    reverse = total_mean_alien_number(FockVacuumState(J2), J1)
    state = FockVacuumState(J1)
    records = []
    for i, (w1, w2) in enumerate(zip(args.omega1, args.omega2)):
        f = np.zeros(J1.dim)
        f[2 * i] = 1.0
        records.append({
            "mode": i,
            "omega1": float(w1),
            "omega2": float(w2),
            "mean": mean_alien_number(state, J2, f),
            "variance": alien_number_variance(state, J2, f),
            "total_mean": report.total_mean,
            "total_mean_reverse": reverse,
            "trace_mu2": report.trace_mu2,
            "verdict": report.verdict.value,
        })
    return records, None


def cmd_numdist(args):
    _require_pair(args)
    if not 0 <= args.mode < len(args.omega1):
        raise UsageError(f"--mode must lie in 0..{len(args.omega1) - 1}")
    J1 = j_from_dynamics(_oscillators(args.omega1), args.tol)
    J2 = j_from_dynamics(_oscillators(args.omega2), args.tol)
    f = np.zeros(J1.dim)
    f[2 * args.mode] = 1.0
    probs, _ = alien_number_distribution(FockVacuumState(J1), J2, f, args.nmax, max_cutoff=args.cutoff)
    cum = np.cumsum(probs)
    return [
        {"k": k, "probability": float(p), "cumulative": float(c), "tail_beyond": float(1.0 - c)}
        for k, (p, c) in enumerate(zip(probs, cum))
    ], None


def cmd_unruh(args):
    rows = unruh_spectrum(_model(args), args.wedge)
    return [
        {
            "mode": r.mode,
            "kappa": r.kappa,
            "mean_occupation": r.mean_occupation,
            "bose_einstein": r.bose_einstein,
            "abs_rel_err": r.abs_rel_err,
        }
        for r in rows
    ], None


HANDLERS = {
    "validate": cmd_validate,
    "quantize": cmd_quantize,
    "compare": cmd_compare,
    "numdist": cmd_numdist,
    "unruh": cmd_unruh,
}


def _diagnose(code, message, check=None, stream=None):
    stream = stream or sys.stderr
    record = {"level": "error", "exit_code": code, "message": message}
    if check:
        record["check"] = check
    stream.write(json.dumps(record) + "\n")


def _emit(records, args):
    text = tables.dumps(records, args.command, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv=None) -> int:
    try:
        args = parse_args(argv)
    except UsageError as exc:
        _diagnose(EXIT_USAGE, str(exc))
        return EXIT_USAGE
    try:
        records, failure = HANDLERS[args.command](args)
        _emit(records, args)
    except UsageError as exc:
        _diagnose(EXIT_USAGE, str(exc))
        return EXIT_USAGE
    except InvariantError as exc:
        _diagnose(EXIT_INVARIANT, str(exc), exc.check)
        return EXIT_INVARIANT
    except ConvergenceError as exc:
        _diagnose(EXIT_CONVERGENCE, str(exc))
        return EXIT_CONVERGENCE
    except (DimensionError, ValueError) as exc:
        _diagnose(EXIT_USAGE, str(exc))
        return EXIT_USAGE
    except OSError as exc:
        _diagnose(EXIT_USAGE, f"cannot write output: {exc}")
        return EXIT_USAGE
    if failure is not None:
        _diagnose(EXIT_INVARIANT, str(failure), failure.check)
        return EXIT_INVARIANT
    return EXIT_OK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
