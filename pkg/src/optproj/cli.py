"""Command-line front end.

Subcommands: ``optimize``, ``eval``, ``approx-norm``, ``energy`` and
``bench mse``.  Exit status is 0 on success, 2 for bad flags or input
files and 3 when a numeric routine fails.
"""

import argparse
import csv
import io as _stdio
import json
import math
import sys

import numpy as np

from . import approximator, energy, io, objective, optimizer
from .errors import (DimensionMismatch, EmptyInput, InvalidShape, ProjectionError)

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
_INPUT_ERRORS = (io.FileFormatError, InvalidShape, DimensionMismatch, EmptyInput, OSError)

CSV_COLUMNS = ("scheme", "p", "n", "trials", "test_vectors", "mse", "seed")


class UsageError(Exception):
    pass


def _seed(text):
    try:
        s = int(text, 10)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be a decimal integer, got {text!r}") from None
    if not 0 <= s < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return s


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def _positive_float(text):
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError("expected a positive number")
    return v


def parse_int_list(text, allow_p=False):
    """``"8,64"``, ``"3..7"`` or mixes of both; ``"p"`` stands for ``n = p`` if allowed."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if allow_p and part == "p":
            out.append("p")
        elif ".." in part:
            lo, hi = part.split("..", 1)
            try:
                lo, hi = int(lo), int(hi)
            except ValueError:
                raise UsageError(f"bad range {part!r}") from None
            if lo > hi:
                raise UsageError(f"empty range {part!r}")
            out.extend(range(lo, hi + 1))
        else:
            try:
                out.append(int(part))
            except ValueError:
                raise UsageError(f"bad integer {part!r}") from None
    if not out:
        raise UsageError(f"empty list {text!r}")
    if any(v != "p" and v < 1 for v in out):
        raise UsageError("list entries must be positive")
    return out


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=False)


def _report_dict(ds):
    rep = objective.report(ds)
    d = rep.to_dict()
    d["p"], d["n"], d["kind"], d["scale"] = ds.p, ds.n, ds.kind, ds.scale
    return d


# -- subcommands -------------------------------------------------------------

def cmd_optimize(args, out):
    p, n = args.dim, args.num_directions
    cfg = optimizer.OptimizerConfig(delta=args.delta, max_outer_iters=args.max_iters,
                                    restarts=args.restarts, seed=args.seed)
    trace = None
    if p == 2 and not args.force_ascent:
        ds = optimizer.exact_directions_2d(n)
    elif n == p and not args.force_ascent:
        ds = optimizer.exact_directions_np(p)
    else:
        if n < p:
            raise InvalidShape(f"need n >= p, got p = {p}, n = {n}")
        ds, trace = optimizer.coordinate_ascent(p, n, cfg)
    doc = _report_dict(ds)
    if trace is not None:
        doc["trace"] = {"ratios": trace.ratios, "chosen_index": trace.chosen_index,
                        "restarts_best": trace.restarts_best}
    if args.out:
        io.save_direction_set(ds, args.out)
        doc["out"] = args.out
    out.write(_dump(doc) + "\n")


def cmd_eval(args, out):
    ds = io.load_direction_set(args.directions)
    out.write(_dump(_report_dict(ds)) + "\n")


def cmd_approx_norm(args, out):
    ds = io.load_direction_set(args.directions)
    if args.x is not None:
        try:
            x = np.array([float(c) for c in args.x.split(",")])
        except ValueError:
            raise UsageError(f"--x must be comma-separated numbers, got {args.x!r}") from None
        xs = x[None, :]
    else:
        xs = io.load_sample(args.vectors)
    est = np.atleast_1d(approximator.approx_norm(ds, xs))
    exact = np.linalg.norm(xs, axis=1)
    rows = [{"estimate": float(e), "norm": float(t), "relative_error":
             (float(e / t - 1.0) if t > 0 else None)} for e, t in zip(est, exact)]
    out.write(_dump(rows[0] if args.x is not None else rows) + "\n")


def _default_directions(p, n):
    if p == 2:
        return optimizer.exact_directions_2d(n)
    return optimizer.exact_directions_np(p)


def cmd_energy(args, out):
    X = io.load_sample(args.x)
    Y = io.load_sample(args.y)
    if X.shape[1] != Y.shape[1]:
        raise DimensionMismatch(f"samples have {X.shape[1]} and {Y.shape[1]} columns")
    p = X.shape[1]
    if args.method == "exact":
        res = energy.energy_statistic_exact(X, Y)
    else:
        if args.method == "mc":
            ds = approximator.mc_directions(p, args.mc_n, args.seed)
        elif args.directions:
            ds = io.load_direction_set(args.directions)
        else:
            ds = _default_directions(p, args.mc_n)
        res = energy.energy_statistic_projected(X, Y, ds)
    doc = res.to_dict()
    doc["requested_method"] = args.method
    if res.directions_used is not None:
        doc["directions_kind"] = res.directions_used.kind
    out.write(_dump(doc) + "\n")


def _bench_rows(args):
    dims = parse_int_list(args.dim)
    ns = parse_int_list(args.num_directions_list, allow_p=True)
    schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
    for s in schemes:
        if s not in approximator.SCHEMES:
            raise UsageError(f"unknown scheme {s!r}; choose from {approximator.SCHEMES}")
    test_vectors = 100 if args.paper_protocol else args.test_vectors
    cfg = optimizer.OptimizerConfig(restarts=args.restarts, seed=args.seed)
    for scheme in schemes:
        for p in dims:
            for n in ns:
                n = p if n == "p" else n
                try:
                    rep = approximator.mse_experiment(scheme, p, n, test_vectors,
                                                      args.trials, args.seed, cfg)
                except InvalidShape:
                    if args.skip_invalid:
                        continue
                    raise
                yield rep.as_row()


def cmd_bench(args, out):
    buf = _stdio.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for row in _bench_rows(args):
        row["mse"] = repr(row["mse"])
        w.writerow(row)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    else:
        out.write(buf.getvalue())


# -- parser ------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def build_parser():
    ap = _Parser(prog="optproj", description="Optimal projection directions and energy statistics.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    o = sub.add_parser("optimize", help="build a direction set for (p, n)")
    o.add_argument("--dim", type=_positive_int, required=True)
    o.add_argument("--num-directions", type=_positive_int, required=True)
    o.add_argument("--seed", type=_seed, default=0)
    o.add_argument("--restarts", type=_positive_int, default=8)
    o.add_argument("--delta", type=_positive_float, default=1e-6)
    o.add_argument("--max-iters", type=_positive_int, default=500)
    o.add_argument("--force-ascent", action="store_true",
                   help="run coordinate ascent even where a closed form exists")
    o.add_argument("--out")
    o.set_defaults(func=cmd_optimize)

    e = sub.add_parser("eval", help="report V_min, V_max and the error bound of a set")
    e.add_argument("--directions", required=True)
    e.set_defaults(func=cmd_eval)

    a = sub.add_parser("approx-norm", help="estimate norms with a direction set")
    a.add_argument("--directions", required=True)
    g = a.add_mutually_exclusive_group(required=True)
    g.add_argument("--x", help="one vector, comma separated")
    g.add_argument("--vectors", help="CSV file of vectors, one per row")
    a.set_defaults(func=cmd_approx_norm)

    en = sub.add_parser("energy", help="two-sample energy statistic")
    en.add_argument("--x", required=True)
    en.add_argument("--y", required=True)
    en.add_argument("--method", choices=("exact", "projected", "mc"), default="projected")
    en.add_argument("--directions")
    en.add_argument("--mc-n", type=_positive_int, default=8)
    en.add_argument("--seed", type=_seed, default=0)
    en.set_defaults(func=cmd_energy)

    b = sub.add_parser("bench", help="experiment drivers")
    bsub = b.add_subparsers(dest="bench_command", required=True, parser_class=_Parser)
    m = bsub.add_parser("mse", help="mean squared error of norm estimates as CSV")
    m.add_argument("--dim", required=True, help="e.g. 2, 3..7 or 8,9")
    m.add_argument("--num-directions-list", required=True, help="e.g. 8,64,512, 8..11 or p")
    m.add_argument("--schemes", default="optimal-2d,monte-carlo")
    m.add_argument("--trials", type=_positive_int, default=50)
    m.add_argument("--test-vectors", type=_positive_int, default=10_000)
    m.add_argument("--paper-protocol", action="store_true", help="use 100 test vectors")
    m.add_argument("--restarts", type=_positive_int, default=8)
    m.add_argument("--skip-invalid", action="store_true",
                   help="drop scheme/shape pairings that do not apply instead of failing")
    m.add_argument("--seed", type=_seed, default=0)
    m.add_argument("--out")
    m.set_defaults(func=cmd_bench)
    return ap


def main(argv=None, out=None, err=None):
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args.func(args, out)
    except (UsageError, *_INPUT_ERRORS) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ProjectionError, np.linalg.LinAlgError, FloatingPointError) as exc:
        err.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
