"""Command-line interface.

Subcommands: moment, oracle, reduce, sharpness, estimate, sweep, fit.
Exit codes: 0 success, 1 check failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .core import generate, load_coefficients, make_curve
from .counting import brute_force_moment, even_moment, even_moment_fft, moment_auto
from .errors import ConfigInvalid, EngineError
from .estimator import AscentConfig, estimate_K
from .harness import SweepConfig, emit_report, fit_exponent, load_rows, run_sweep
from .quadrature import DEFAULT_MEM_BUDGET_MB
from .reduction import theorem_bound_check, verify_decomposition, verify_dominance
from .sharpness import sharpness_report


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def _common(parser: argparse.ArgumentParser, many_n: bool = False) -> None:
    parser.add_argument("--curve", type=_int_list, required=True, metavar="K1,K2,...")
    parser.add_argument(
        "--N", type=_int_list, required=True, metavar="N" + (",N2,..." if many_n else "")
    )
    parser.add_argument(
        "--p", type=_int_list, required=True, metavar="P" + (",P2,..." if many_n else "")
    )
    parser.add_argument("--coeffs", default="ones", metavar="ones|zero-mean|random-unit|file:PATH")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--mem-budget-mb", type=int, default=DEFAULT_MEM_BUDGET_MB)
    parser.add_argument("--out", default=None)
    parser.add_argument("--format", default="json", choices=("json", "csv"))


def _single(values: tuple[int, ...], name: str) -> int:
    if len(values) != 1:
        raise ConfigInvalid(f"{name} takes exactly one value here, got {values}")
    return values[0]


def _coeffs_for(args, N: int):
    if args.coeffs.startswith("file:"):
        coeffs = load_coefficients(args.coeffs[5:])
        if coeffs.N != N:
            raise ConfigInvalid(f"coefficient file has N={coeffs.N}, requested {N}")
        return coeffs
    return generate(args.coeffs, N, seed=args.seed)


def _even_p(args) -> int:
    p = _single(args.p, "--p")
    if p < 2 or p % 2:
        raise ConfigInvalid(f"p must be a positive even integer, got {p}")
    return p


def _emit(payload: dict, args) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _cmd_moment(args) -> int:
    curve = make_curve(args.curve)
    N = _single(args.N, "--N")
    p = _even_p(args)
    coeffs = _coeffs_for(args, N)
    method = args.method
    if method == "exact":
        mom = even_moment(curve, coeffs, p // 2, args.mem_budget_mb)
    elif method == "grid":
        mom = even_moment_fft(curve, coeffs, p // 2, mem_budget_mb=args.mem_budget_mb)
    elif method == "brute":
        mom = brute_force_moment(curve, coeffs, p // 2)
    else:
        mom = moment_auto(curve, coeffs, p // 2, args.mem_budget_mb)
    _emit(
        {
            "curve": list(curve.exponents),
            "N": N,
            "p": p,
            "lambda": mom.value,
            "lambda_exact": mom.exact,
            "method": method,
        },
        args,
    )
    return 0


def _cmd_oracle(args) -> int:
    curve = make_curve(args.curve)
    N = _single(args.N, "--N")
    p = _even_p(args)
    mom = brute_force_moment(curve, _coeffs_for(args, N), p // 2)
    _emit(
        {
            "curve": list(curve.exponents),
            "N": N,
            "p": p,
            "lambda": mom.value,
            "lambda_exact": mom.exact,
            "method": "brute",
        },
        args,
    )
    return 0


def _cmd_reduce(args) -> int:
    curve = make_curve(args.curve)
    N = _single(args.N, "--N")
    p = _even_p(args)
    u = p // 2
    coeffs = _coeffs_for(args, N)
    dec = verify_decomposition(curve, coeffs, u, args.mem_budget_mb)
    dom = verify_dominance(curve, coeffs, u, mem_budget_mb=args.mem_budget_mb)
    bnd = theorem_bound_check(curve, coeffs, u, args.mem_budget_mb)
    merged = dec.to_dict()
    for key, val in dom.to_dict().items():
        if merged.get(key) is None:
            merged[key] = val
    for key, val in bnd.to_dict().items():
        if merged.get(key) is None:
            merged[key] = val
    _emit(merged, args)
    tol = 0.0 if dec.exact else 1e-10 * max(abs(dec.moment.value), 1.0)
    ok = (
        dec.decomposition_residual <= tol
        and dom.dominance_violations == 0
        and bnd.box_bound_ok is not False
    )
    return 0 if ok else 1


def _cmd_sharpness(args) -> int:
    curve = make_curve(args.curve)
    N = _single(args.N, "--N")
    p = _even_p(args)
    report = sharpness_report(
        curve, N, p, samples=args.samples, seed=args.seed, mem_budget_mb=args.mem_budget_mb
    )
    _emit(report.to_dict(), args)
    return 0 if report.all_hold else 1


def _cmd_estimate(args) -> int:
    curve = make_curve(args.curve)
    N = _single(args.N, "--N")
    p = _single(args.p, "--p")
    config = AscentConfig(
        multistarts=args.multistarts,
        seed=args.seed,
        max_iters=args.max_iters,
        mem_budget_mb=args.mem_budget_mb,
    )
    result = estimate_K(curve, N, p, config)
    _emit(result.to_dict(), args)
    return 0


def _cmd_sweep(args) -> int:
    config = SweepConfig(
        curve=args.curve,
        N_list=args.N,
        p_list=args.p,
        coeffs=args.coeffs,
        seed=args.seed,
        checks=tuple(args.checks.split(",")) if args.checks else (),
        fit_quantity=args.fit,
        fit_tolerance=args.fit_tolerance,
        samples=args.samples,
        multistarts=args.multistarts,
        mem_budget_mb=args.mem_budget_mb,
        include_timestamp=not args.no_timestamp,
    )
    report = run_sweep(config)
    if args.out:
        emit_report(report, args.format, args.out)
    else:
        print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 1 if report.failures else 0


def _cmd_fit(args) -> int:
    rows = load_rows(args.infile)
    fit = fit_exponent(rows, args.quantity, tolerance=args.tolerance)
    print(json.dumps(fit.to_dict(), indent=2, sort_keys=True))
    return 0 if fit.verdict else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvemoments",
        description="Moments and extension constants of exponential sums over "
        "integer power curves.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_moment = sub.add_parser("moment", help="even moment of |F|^p")
    _common(p_moment)
    p_moment.add_argument("--method", default="auto", choices=("auto", "exact", "grid", "brute"))
    p_moment.set_defaults(fn=_cmd_moment)

    p_oracle = sub.add_parser("oracle", help="brute-force ground-truth moment")
    _common(p_oracle)
    p_oracle.set_defaults(fn=_cmd_oracle)

    p_reduce = sub.add_parser("reduce", help="shift decomposition and dominance checks")
    _common(p_reduce)
    p_reduce.set_defaults(fn=_cmd_reduce)

    p_sharp = sub.add_parser("sharpness", help="lower bounds for the unit-weight probe")
    _common(p_sharp)
    p_sharp.add_argument("--samples", type=int, default=1000)
    p_sharp.set_defaults(fn=_cmd_sharpness)

    p_est = sub.add_parser("estimate", help="gradient-ascent extension constant estimate")
    _common(p_est)
    p_est.add_argument("--multistarts", type=int, default=8)
    p_est.add_argument("--max-iters", type=int, default=200)
    p_est.set_defaults(fn=_cmd_estimate)

    p_sweep = sub.add_parser("sweep", help="grid of (N, p) rows with selected checks")
    _common(p_sweep, many_n=True)
    p_sweep.add_argument("--checks", default="moment", metavar="moment,reduce,sharpness,estimate")
    p_sweep.add_argument("--fit", default=None, choices=("lambda", "K"))
    p_sweep.add_argument("--fit-tolerance", type=float, default=0.6)
    p_sweep.add_argument("--samples", type=int, default=1000)
    p_sweep.add_argument("--multistarts", type=int, default=8)
    p_sweep.add_argument("--no-timestamp", action="store_true")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_fit = sub.add_parser("fit", help="log-log exponent fit of an emitted report")
    p_fit.add_argument("--in", dest="infile", required=True)
    p_fit.add_argument("--quantity", default="lambda", choices=("lambda", "K"))
    p_fit.add_argument("--tolerance", type=float, default=0.6)
    p_fit.set_defaults(fn=_cmd_fit)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigInvalid as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except EngineError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
