"""Command-line front end.

Exit codes: 0 success, 1 computational failure (failed check, violated
precondition, non-convergence), 2 usage or input-schema error.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

import numpy as np

from . import coframe as cf
from .diffeo import act_on_hill
from .errors import InvalidInputError, VirateichError
from .hill import ds_normalize, hill_from_asu, monodromy
from .serialization import (
    dump_json,
    load_coframe,
    load_connection,
    load_diffeo,
    load_fn_point,
    load_potential,
    load_trumpet,
    read_json,
)
from .spectral import grid
from .suites import SUITE_NAMES, run_suite
from .teich import boundary_moment
from .trumpet import darboux_u

SEED_ENV = "VIRATEICH_SEED"

EMIT_HELP = """CSV columns by kind:
  darboux          x, u            (input: trumpet point {"ell", "F"})
  boundary_moment  x, phi_0 .. phi_{r-1}  (input: Fenchel-Nielsen point)
  curvature_table  x, y, r1, r2, K, connection_curvature
                   (input: coframe grid {"nx","y","data"} or {"example","nx",...})
"""


def grid_size(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 64 or n & (n - 1):
        raise argparse.ArgumentTypeError(f"--n must be a power of two >= 64, got {n}")
    return n


def positive_int(text):
    try:
        k = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if k < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {k}")
    return k


def positive_float(text):
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not x > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {x}")
    return x


def resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise InvalidInputError(f"{SEED_ENV} must be an integer, got {env!r}") from None


def _suite_flags(p, default_trials=20):
    p.add_argument("--n", type=grid_size, default=256, help="grid size, power of two >= 64 (default 256)")
    p.add_argument("--trials", type=positive_int, default=default_trials, help="random trials per check")
    p.add_argument("--seed", type=int, default=None, help=f"PRNG seed (fallback: ${SEED_ENV}, then 0)")
    p.add_argument("--tol-scale", type=positive_float, default=1.0, help="multiply every tolerance")
    p.add_argument("--json-out", type=Path, default=None, help="write the suite report as JSON")
    p.add_argument("--timings", action="store_true", help="include wall times in the JSON report")


def build_parser():
    parser = argparse.ArgumentParser(prog="virateich", description="Hill potentials, trumpets and their symplectic forms.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run seeded verification suites")
    p.add_argument("--suite", choices=("all",) + SUITE_NAMES, default="all")
    _suite_flags(p)

    p = sub.add_parser("hill", help="Hill potentials of boundary connections")
    p.add_argument("action", choices=("from_asu", "transform", "monodromy", "ds_normalize"))
    p.add_argument("--input", type=Path, required=True, help="connection (from_asu, ds_normalize) or potential JSON")
    p.add_argument("--diffeo", type=Path, default=None, help="diffeomorphism JSON (transform)")
    p.add_argument("--out", type=Path, default=None, help="result JSON (stdout if omitted); potentials get a .csv companion")

    p = sub.add_parser("emit", help="tabulate derived quantities as CSV", epilog=EMIT_HELP,
                       formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("kind", choices=("darboux", "boundary_moment", "curvature_table"))
    p.add_argument("--input", type=Path, required=True)
    p.add_argument("--out", type=Path, default=None, help="CSV path (stdout if omitted)")

    p = sub.add_parser("trumpet", help="trumpet symplectic form checks")
    p.add_argument("action", choices=("verify",))
    _suite_flags(p)

    p = sub.add_parser("groupoid", help="groupoid 2-form checks")
    p.add_argument("action", choices=("verify",))
    _suite_flags(p)
    p.add_argument("--csv-out", type=Path, default=None, help="write the residual table as CSV")
    return parser


def _write_csv(header, rows, path):
    if path is None:
        writer = csv.writer(sys.stdout, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)
        return
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(x):
    return repr(float(x))


def _run_suite_cmd(args, name):
    seed = resolve_seed(args.seed)
    report = run_suite(name, n=args.n, trials=args.trials, seed=seed, tol_scale=args.tol_scale)
    width = max(len(c.name) for c in report.checks)
    print(f"suite {report.suite}  n={report.n}  trials={report.trials}  seed={report.seed}")
    for c in report.checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"  {status}  {c.name:<{width}}  max residual {c.max_residual:.3e}  tol {c.tolerance:.1e}  trials {c.trials}")
        if c.error:
            print(f"        {c.error}")
    print("all checks passed" if report.passed else "SOME CHECKS FAILED")
    if args.json_out is not None:
        dump_json(report.to_dict(timings=args.timings), args.json_out)
    return report


def cmd_verify(args):
    return 0 if _run_suite_cmd(args, args.suite).passed else 1


def cmd_trumpet(args):
    return 0 if _run_suite_cmd(args, "trumpet").passed else 1


def cmd_groupoid(args):
    report = _run_suite_cmd(args, "groupoid")
    if args.csv_out is not None:
        rows = [(c.name, _fmt(c.max_residual), _fmt(c.tolerance), int(c.passed), c.trials) for c in report.checks]
        _write_csv(("check", "max_residual", "tolerance", "passed", "trials"), rows, args.csv_out)
    return 0 if report.passed else 1


def _emit_potential(T, out, extra=None):
    payload = {"potential": T.to_dict()}
    if extra:
        payload.update(extra)
    if out is None:
        sys.stdout.write(dump_json(payload))
        return
    dump_json(payload, out)
    rows = [(_fmt(x), _fmt(t)) for x, t in zip(grid(T.n), T.values)]
    _write_csv(("x", "T"), rows, out.with_suffix(".csv"))


def cmd_hill(args):
    data = read_json(args.input)
    if args.action == "from_asu":
        _emit_potential(hill_from_asu(load_connection(data)), args.out)
    elif args.action == "ds_normalize":
        h, T = ds_normalize(load_connection(data))
        _emit_potential(T, args.out, {"gauge": h.to_dict()})
    elif args.action == "transform":
        if args.diffeo is None:
            raise InvalidInputError("transform needs --diffeo")
        T = load_potential(data)
        F = load_diffeo(read_json(args.diffeo))
        _emit_potential(act_on_hill(F, T), args.out)
    else:
        M = monodromy(load_potential(data))
        payload = {"monodromy": M.to_dict()}
        if args.out is None:
            sys.stdout.write(dump_json(payload))
        else:
            dump_json(payload, args.out)
    return 0


def cmd_emit(args):
    data = read_json(args.input)
    if args.kind == "darboux":
        u = darboux_u(load_trumpet(data))
        _write_csv(("x", "u"), [(_fmt(x), _fmt(v)) for x, v in zip(grid(u.n), u.values)], args.out)
    elif args.kind == "boundary_moment":
        moments = boundary_moment(load_fn_point(data))
        if not moments:
            raise InvalidInputError("point has no boundary circles")
        n = moments[0].n
        header = ("x",) + tuple(f"phi_{j}" for j in range(len(moments)))
        rows = [(_fmt(grid(n)[k]),) + tuple(_fmt(m.values[k]) for m in moments) for k in range(n)]
        _write_csv(header, rows, args.out)
    else:
        C = load_coframe(data)
        R = cf.structure_residuals(C)
        m = cf.connection_curvature(C, off_tol=np.inf)
        X, Y = C.grid.mesh()
        rows = [
            tuple(_fmt(v) for v in vals)
            for vals in zip(X.ravel(), Y.ravel(), R.r1.ravel(), R.r2.ravel(), R.K.ravel(), m.ravel())
        ]
        _write_csv(("x", "y", "r1", "r2", "K", "connection_curvature"), rows, args.out)
    return 0


COMMANDS = {"verify": cmd_verify, "hill": cmd_hill, "emit": cmd_emit, "trumpet": cmd_trumpet, "groupoid": cmd_groupoid}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except InvalidInputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VirateichError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
