"""Command-line entry point: ``phistab <subcommand> ...``.

Exit codes: 0 success (all checks pass), 1 a verification failed, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

from . import bounds, fkn, oracle, roots
from .bounds import BOUND_KINDS, RegimeError
from .bounds.generic import InfeasibleStartsError
from .cube import EncodingError, decode, degree_weights, dictator, wht
from .phi import PhiSpec, phi_mutual_information, phi_stability

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
OMEGA_CHOICES = {"min": "pointwise_min", "fkn": "fkn_recursive", "khintchine": "khintchine",
                 "chang": "chang_combined"}


class UsageError(Exception):
    pass


def parse_range(text: str, flag: str) -> list:
    """``lo:hi:step`` (inclusive; ``round((hi-lo)/step) + 1`` points) or a single number."""
    parts = text.split(":")
    try:
        nums = [float(x) for x in parts]
    except ValueError:
        raise UsageError(f"{flag}: cannot parse {text!r} as a number or lo:hi:step range") from None
    if len(nums) == 1:
        return nums
    if len(nums) != 3:
        raise UsageError(f"{flag}: range must be lo:hi:step, got {text!r}")
    lo, hi, step = nums
    if step <= 0 or hi < lo:
        raise UsageError(f"{flag}: range needs step > 0 and hi >= lo, got {text!r}")
    count = int(round((hi - lo) / step)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def _num(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (list, dict)):
        obj = obj.item()
    return _num(obj)


def _float(x: float) -> str:
    # fixed 17 significant digits: exact round trip, identical on every run
    text = format(x, ".17g")
    return text if any(c in text for c in ".en") else text + ".0"


def _encode(obj) -> str:
    if obj is None or isinstance(obj, (bool, str, int)) and not isinstance(obj, float):
        return json.dumps(obj)
    if isinstance(obj, float):
        return _float(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_encode(v)}" for k, v in obj.items()) + "}"
    return "[" + ", ".join(_encode(v) for v in obj) + "]"


def dumps(obj) -> str:
    return _encode(_clean(obj))


def _cell(x) -> str:
    x = _clean(x)
    if x is None:
        return ""
    return _float(x) if isinstance(x, float) else str(x)


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_cell(row.get(h)) for h in header])
    return buf.getvalue()


def spec_from(args) -> PhiSpec:
    try:
        return PhiSpec(args.alpha, args.sym, "power" if args.power else "log")
    except ValueError as exc:
        raise UsageError(f"--alpha: {exc}") from None


def _add_phi(p, alpha_range=False):
    p.add_argument("--alpha", type=str if alpha_range else float, default="1" if alpha_range else 1.0,
                   help="Phi parameter" + (" (number or lo:hi:step)" if alpha_range else ""))
    p.add_argument("--sym", action="store_true", help="symmetric Phi")
    p.add_argument("--power", action="store_true", help="use t**alpha instead of t*ln_alpha(t)")


# ---------------------------------------------------------------- subcommands

def run_stab(args):
    if (args.f is None) == (args.dictator is None):
        raise UsageError("stab: give exactly one of --f ENCODING or --dictator N[,K]")
    if args.f is not None:
        try:
            f = decode(args.f)
        except EncodingError as exc:
            raise UsageError(f"--f: {exc}") from None
    else:
        try:
            n, *rest = (int(x) for x in args.dictator.split(","))
            f = dictator(n, rest[0] if rest else 1)
        except ValueError as exc:
            raise UsageError(f"--dictator: {exc}") from None
    spec = spec_from(args)
    rho = _rho(args.rho)
    out = {"function": f.encode(), "phi": spec.label, "rho": rho,
           "stability": phi_stability(f, spec, rho),
           "mutual_information": phi_mutual_information(f, spec, rho), "mean": f.mean,
           "degree_weights": degree_weights(wht(f)).w.tolist()}
    return [out], ["function", "phi", "rho", "stability", "mutual_information", "mean"], EXIT_OK


def _rho(rho, closed=True):
    if not (0.0 <= rho <= 1.0 if closed else 0.0 < rho < 1.0):
        raise UsageError(f"--rho: {rho} outside {'[0, 1]' if closed else '(0, 1)'}")
    return rho


def _bound_options(kind, args):
    opts = {}
    if kind in ("gamma-bar", "gamma-hat", "lambda2", "gamma-tilde") and args.grid:
        opts["grid"] = args.grid
    if kind == "gamma-tilde" and args.reflect != "auto":
        opts["reflect"] = args.reflect == "on"
    if kind == "upsilon":
        opts["omega"] = fkn.WeightBoundSpec(OMEGA_CHOICES[args.omega])
        if args.beta_grid:
            opts["beta_grid"] = args.beta_grid
        if args.z_grid:
            opts["z_grid"] = args.z_grid
    if kind == "lambda-generic":
        if args.seed is None:
            raise UsageError("--seed: required for lambda-generic (multistart reproducibility)")
        opts.update(m=args.m, multistart=args.multistart, seed=args.seed)
    return opts


def _evaluate(kind, a, rho, spec, args):
    _rho(rho, closed=False)
    try:
        return bounds.evaluate(kind, a, rho, spec, **_bound_options(kind, args))
    except RegimeError as exc:
        raise UsageError(f"{kind}: {exc}") from None
    except InfeasibleStartsError as exc:
        raise UsageError(f"{kind}: {exc} {exc.diagnostics}") from None
    except ValueError as exc:
        raise UsageError(f"--a/--rho: {exc}") from None


def run_bound(args):
    spec = spec_from(args)
    res = _evaluate(args.kind, args.a, args.rho, spec, args)
    rec = res.to_dict() if args.full else res.record()
    return [rec], list(res.record()), EXIT_OK


def run_roots(args):
    try:
        if args.which == "rho-star":
            res = roots.rho_star(args.tol)
        else:
            if args.alpha is None:
                raise UsageError("--alpha: required for roots theta")
            res = roots.theta(args.alpha, args.tol)
    except (ValueError, roots.BracketError) as exc:
        raise UsageError(f"--alpha/--tol: {exc}") from None
    return [res.to_dict()], ["root", "residual", "iterations"], EXIT_OK


def run_region(args):
    alphas = parse_range(args.alpha, "--alpha")
    try:
        rows = roots.region_curve(alphas[0], alphas[-1], len(alphas), workers=args.workers)
    except ValueError as exc:
        raise UsageError(f"--alpha: {exc}") from None
    return ([{"alpha": a, "rho_threshold": t} for a, t in rows], ["alpha", "rho_threshold"],
            EXIT_OK)


def run_fkn(args):
    out = []
    for beta in parse_range(args.beta, "--beta"):
        if not 0 <= beta <= 0.5:
            raise UsageError(f"--beta: {beta} outside [0, 1/2]")
        w4 = fkn.exhaustive_W_beta(4, 0.5, beta).value if args.exhaustive else None
        out.append({"beta": beta, "omega_fkn": fkn.omega_fkn(0.5, beta),
                    "omega_khintchine": fkn.omega_khintchine(beta),
                    "omega_min": fkn.omega_min(beta), "exhaustive_W4": w4})
    return out, ["beta", "omega_fkn", "omega_khintchine", "omega_min", "exhaustive_W4"], EXIT_OK


def _check_n(n):
    if not 1 <= n <= 4:
        raise UsageError(f"--n: {n} outside [1, 4] (n = 5 is available from the library only)")


def run_verify(args):
    _check_n(args.n)
    spec = spec_from(args)
    rhos = [_rho(r, closed=False) for r in parse_range(args.rho, "--rho")]
    if args.which == "dictator":
        reports = oracle.verify_dictator(args.n, spec, rhos, workers=args.workers)
    else:
        if args.bound is None:
            raise UsageError("--bound: required for verify dominance")
        reports = []
        for rho in rhos:
            res = _evaluate(args.bound, args.a, rho, spec, args)
            try:
                reports.append(oracle.verify_dominance(args.n, args.a, spec, rho, res,
                                                       workers=args.workers))
            except ValueError as exc:
                raise UsageError(f"--a: {exc}") from None
    rows = [r.to_dict() for r in reports]
    code = EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL
    header = ["check", "n", "rho", "mean", "enumerated_max", "dictator_value", "gap",
              "bound_value", "dominance_margin", "passed"]
    return rows, header, code


def run_sweep(args):
    kind = args.kind
    out = []
    for alpha in parse_range(args.alpha, "--alpha"):
        try:
            spec = PhiSpec(alpha, args.sym, "power" if args.power else "log")
        except ValueError as exc:
            raise UsageError(f"--alpha: {exc}") from None
        for rho in parse_range(args.rho, "--rho"):
            res = _evaluate(kind, args.a, rho, spec, args)
            ref = oracle.reference_value(4, args.a, spec, rho) if args.a == 0.5 else None
            row = {"rho": rho, "alpha": alpha, "value": res.value, "dictator_value": ref,
                   "gap": None if ref is None else res.value - ref}
            row.update({k: v for k, v in res.record().items() if k != "value"})
            out.append(row)
    header = ["rho", "alpha", "value", "dictator_value", "gap", "beta", "z1", "z2", "p", "q",
              "feasible", "grid", "refine_iters", "residual"]
    return out, header, EXIT_OK


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="phistab", description="Phi-stability of Boolean "
                                     "functions: bounds, threshold roots and exhaustive checks.")
    _add_output_flags(parser, None, "-", 1)
    # the same flags are accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    _add_output_flags(common, argparse.SUPPRESS, argparse.SUPPRESS, argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)
    add = sub.add_parser

    def add_parser(name, **kw):
        return add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    p = sub.add_parser("stab", help="stability of one function")
    p.add_argument("--f", help="encoding n:<dim>;table:<hex>")
    p.add_argument("--dictator", help="N[,K]: dictator x_K = +1 on N bits")
    p.add_argument("--rho", type=float, required=True)
    _add_phi(p)
    p.set_defaults(func=run_stab)

    p = sub.add_parser("bound", help="evaluate one upper bound")
    p.add_argument("kind", choices=BOUND_KINDS)
    _add_bound_flags(p)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--full", action="store_true", help="include diagnostics and extra parameters")
    _add_phi(p)
    p.set_defaults(func=run_bound)

    p = sub.add_parser("roots", help="scalar threshold equations")
    p.add_argument("which", choices=("rho-star", "theta"))
    p.add_argument("--tol", type=float, default=1e-12)
    p.add_argument("--alpha", type=float)
    p.set_defaults(func=run_roots)

    p = sub.add_parser("region", help="dictator-optimality region threshold curve")
    p.add_argument("--alpha", default="1.01:1.99:0.01", help="lo:hi:step inside (1, 2)")
    p.set_defaults(func=run_region)

    p = sub.add_parser("fkn", help="level-1 weight bounds on a beta grid")
    p.add_argument("--beta", default="0:0.5:0.0625")
    p.add_argument("--no-exhaustive", dest="exhaustive", action="store_false",
                   help="skip the n=4 enumeration column")
    p.set_defaults(func=run_fkn)

    p = sub.add_parser("verify", help="exhaustive checks at n <= 4")
    p.add_argument("which", choices=("dictator", "dominance"))
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--rho", required=True, help="number or lo:hi:step")
    p.add_argument("--bound", choices=BOUND_KINDS)
    _add_bound_flags(p)
    _add_phi(p)
    p.set_defaults(func=run_verify)

    p = sub.add_parser("sweep", help="bound minus dictator value over a (rho, alpha) grid")
    p.add_argument("kind", choices=BOUND_KINDS)
    _add_bound_flags(p)
    p.add_argument("--rho", required=True, help="number or lo:hi:step")
    _add_phi(p, alpha_range=True)
    p.set_defaults(func=run_sweep)
    return parser


def _add_output_flags(p, fmt, output, workers):
    p.add_argument("--format", choices=("json", "csv"), default=fmt,
                   help="output format (default: csv for region/fkn/sweep, json otherwise)")
    p.add_argument("--output", default=output, help="output path ('-' for stdout)")
    p.add_argument("--workers", type=int, default=workers,
                   help="worker threads (never changes output)")


def _add_bound_flags(p):
    p.add_argument("--a", type=float, default=0.5, help="mean of the function class")
    p.add_argument("--grid", type=int, default=0, help="grid points per dimension (0: default)")
    p.add_argument("--reflect", choices=("auto", "on", "off"), default="auto")
    p.add_argument("--omega", choices=tuple(OMEGA_CHOICES), default="min")
    p.add_argument("--beta-grid", type=int, default=0)
    p.add_argument("--z-grid", type=int, default=0)
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--multistart", type=int, default=64)
    p.add_argument("--seed", type=int)


def render(rows, header, fmt) -> str:
    if fmt == "csv":
        return to_csv(header, rows)
    return "".join(dumps(r) + "\n" for r in rows)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.workers < 1:
        parser.error("--workers: must be at least 1")
    fmt = args.format or ("csv" if args.command in ("region", "fkn", "sweep") else "json")
    try:
        rows, header, code = args.func(args)
    except UsageError as exc:
        print(f"phistab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(rows, header, fmt)
    if args.output == "-":
        sys.stdout.write(text)
    else:
        with open(args.output, "w") as fh:
            fh.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
