"""Command-line entry point with reproducible seeding and CSV emission.

Exit codes: 0 success, 1 failed verification verdict (ordering violation or
reflection/partial mismatch), 2 argument or input-file error.
"""
from __future__ import annotations

import argparse
import os
import sys
from contextlib import contextmanager

import numpy as np

from . import analysis, fluid as fluid_mod
from .distributions import DistSpec, ModelParams, example1_params
from .paths import write_path_csv
from .simulate import (
    ModelKind,
    format_scenario,
    generate_stream,
    parse_scenario,
    simulate,
    skorokhod_equivalence_check,
)

_DEFAULTS = example1_params()


def _add_param_flags(p: argparse.ArgumentParser):
    p.add_argument("--m0", type=float, default=_DEFAULTS.m0, help="initial capital (default %(default)s)")
    p.add_argument("--lambda-d", type=float, default=_DEFAULTS.lambda_d, help="donation arrival rate (default %(default)s)")
    p.add_argument("--lambda-b", type=float, default=_DEFAULTS.lambda_b, help="bail arrival rate (default %(default)s)")
    p.add_argument("--dist-d", default=_DEFAULTS.dist_d.to_text(), help="donation size distribution (default %(default)s)")
    p.add_argument("--dist-b", default=_DEFAULTS.dist_b.to_text(), help="bail size distribution (default %(default)s)")
    p.add_argument("--dist-p", default=_DEFAULTS.dist_p.to_text(), help="poundage distribution on [0,1] (default %(default)s)")
    p.add_argument("--dist-s", default=_DEFAULTS.dist_s.to_text(), help="trial delay distribution (default %(default)s)")


def _add_common_flags(p: argparse.ArgumentParser, dt: bool = False):
    default_seed = int(os.environ.get("BAILFUND_SEED", "0"))
    p.add_argument("--seed", type=int, default=default_seed, help="RNG seed (default %(default)s, env BAILFUND_SEED)")
    p.add_argument("--eta", type=float, default=1.0, help="scale factor (default %(default)s)")
    p.add_argument("--t-end", type=float, default=100.0, help="horizon T (default %(default)s)")
    if dt:
        p.add_argument("--dt", type=float, default=0.01, help="grid step (default %(default)s)")
    p.add_argument("-o", "--output", default="-", help="output CSV path, '-' for stdout (default)")


def _params_from_args(args) -> ModelParams:
    return ModelParams(
        m0=args.m0,
        lambda_d=args.lambda_d,
        lambda_b=args.lambda_b,
        dist_d=DistSpec.from_text(args.dist_d),
        dist_b=DistSpec.from_text(args.dist_b),
        dist_p=DistSpec.from_text(args.dist_p),
        dist_s=DistSpec.from_text(args.dist_s),
    )


@contextmanager
def _open_out(dest: str):
    if dest == "-":
        yield sys.stdout
    else:
        with open(dest, "w", newline="") as fh:
            yield fh


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bailfund", description=__doc__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("simulate", help="simulate one model variant, emit its path as CSV")
    p.add_argument("--model", default="inf", choices=[k.value for k in ModelKind])
    p.add_argument("--scenario", help="scripted event file instead of random generation")
    p.add_argument("--events-out", help="also write the realized event stream in scenario format")
    p.add_argument(
        "--skorokhod-return-factor",
        choices=["one-minus-p", "p"],
        default="one-minus-p",
        help="return factor for the reflected model (default %(default)s)",
    )
    _add_param_flags(p)
    _add_common_flags(p)

    p = sub.add_parser("fluid", help="evaluate a fluid limit curve, emit t,value CSV")
    p.add_argument("--model", default="inf", choices=[m.value for m in fluid_mod.FluidModel])
    _add_param_flags(p)
    _add_common_flags(p, dt=True)

    p = sub.add_parser("converge", help="median sup-norm error vs the fluid curve per eta")
    p.add_argument("--model", default="inf", choices=["inf", "block", "skorokhod"])
    p.add_argument("--etas", default="1,4,16,64,256", help="comma-separated scale factors")
    p.add_argument("--reps", type=int, default=200)
    p.add_argument("--jobs", type=int, default=1)
    _add_param_flags(p)
    _add_common_flags(p, dt=True)

    p = sub.add_parser("order", help="pathwise ordering check over coupled replications")
    p.add_argument("--family", default="no-returns", choices=["no-returns", "with-returns"])
    p.add_argument("--reps", type=int, default=1000)
    p.add_argument("--jobs", type=int, default=1)
    _add_param_flags(p)
    _add_common_flags(p)

    p = sub.add_parser("diagnose", help="centered-component (compensator) diagnostics")
    p.add_argument("--component", default="bail", choices=["donation", "bail", "return"])
    p.add_argument("--reps", type=int, default=500)
    p.add_argument("--checkpoints", default="2,5,10", help="comma-separated times")
    p.add_argument("--jobs", type=int, default=1)
    _add_param_flags(p)
    _add_common_flags(p)

    p = sub.add_parser("mean", help="pointwise sample mean/std over replications")
    p.add_argument("--model", default="inf", choices=[k.value for k in ModelKind])
    p.add_argument("--reps", type=int, default=100)
    p.add_argument("--grid", default="", help="comma-separated times (default: 0..T step 1)")
    p.add_argument("--jobs", type=int, default=1)
    _add_param_flags(p)
    _add_common_flags(p)

    p = sub.add_parser("equiv", help="reflected-map vs partial-payout recursion identity check")
    p.add_argument("--reps", type=int, default=100)
    _add_param_flags(p)
    _add_common_flags(p)

    return parser


def _cmd_simulate(args) -> int:
    params = _params_from_args(args)
    if args.scenario:
        try:
            with open(args.scenario) as fh:
                text = fh.read()
        except OSError as exc:
            print(f"cannot read scenario file {args.scenario}: {exc}", file=sys.stderr)
            return 2
        try:
            stream = parse_scenario(text)
        except ValueError as exc:
            print(f"bad scenario file {args.scenario}: {exc}", file=sys.stderr)
            return 2
    else:
        stream = generate_stream(params, args.eta, args.seed, args.t_end)
    result = simulate(ModelKind(args.model), params, stream, args.skorokhod_return_factor)
    if args.events_out:
        with open(args.events_out, "w", newline="") as fh:
            fh.write(format_scenario(stream))
    with _open_out(args.output) as fh:
        write_path_csv(result.path, fh)
    return 0


def _write_curve(curve, fh):
    fh.write("t,value\r\n")
    for t, v in zip(curve.times, curve.values):
        fh.write(f"{t:.17g},{v:.17g}\r\n")


def _cmd_fluid(args) -> int:
    params = _params_from_args(args)
    model = fluid_mod.FluidModel(args.model)
    if model is fluid_mod.FluidModel.INF_FLUID:
        curve = fluid_mod.inf_fluid(params, args.t_end, args.dt)
    elif model is fluid_mod.FluidModel.SKOROKHOD_FLUID:
        res = fluid_mod.skorokhod_fluid(params, args.t_end, args.dt)
        curve = res.curve
        print(f"regime={res.regime}", file=sys.stderr)
    else:
        curve = fluid_mod.blocking_fluid(params, args.t_end, args.dt)
    verdict = fluid_mod.steady_state_classify(params)
    out = sys.stderr if args.output == "-" else sys.stdout
    print(fluid_mod.format_verdict(verdict), file=out)
    with _open_out(args.output) as fh:
        _write_curve(curve, fh)
    return 0


_CONVERGE_KIND = {
    "inf": ModelKind.INF_RETURNS,
    "block": ModelKind.BLOCKING_RETURNS,
    "skorokhod": ModelKind.SKOROKHOD_RETURNS,
}


def _cmd_converge(args) -> int:
    params = _params_from_args(args)
    etas = [float(e) for e in args.etas.split(",")]
    report = analysis.convergence_study(
        _CONVERGE_KIND[args.model], params, etas, args.reps, args.t_end,
        seed0=args.seed, dt=args.dt, jobs=args.jobs,
    )
    with _open_out(args.output) as fh:
        fh.write("eta,rep,sup_error\r\n")
        for cell in report.cells:
            for r, err in enumerate(cell.sup_errors):
                fh.write(f"{cell.eta:.17g},{r},{err:.17g}\r\n")
    for cell in report.cells:
        print(f"eta={cell.eta:g} median={cell.median:.6g} q90={cell.q90:.6g}", file=sys.stderr)
    return 0


def _cmd_order(args) -> int:
    params = _params_from_args(args)
    family = args.family.replace("-", "_")
    report = analysis.ordering_study(
        family, params, args.reps, args.t_end, seed0=args.seed, jobs=args.jobs
    )
    if args.output != "-" or report.violations:
        with _open_out(args.output) as fh:
            fh.write("seed,time,pair,lhs,rhs,violation\r\n")
            for v in report.violations:
                fh.write(
                    f"{v.seed},{v.time:.17g},{v.pair},{v.lhs:.17g},{v.rhs:.17g},{v.magnitude:.17g}\r\n"
                )
    print(f"violations={len(report.violations)} max_violation={report.max_violation:.6g}")
    return 0 if report.passed and not report.violations else 1


_DIAG_COMPONENT = {"donation": "donation", "bail": "bail_blocking", "return": "return_blocking"}


def _cmd_diagnose(args) -> int:
    params = _params_from_args(args)
    checkpoints = [float(t) for t in args.checkpoints.split(",")]
    diag = analysis.compensator_diagnostic(
        _DIAG_COMPONENT[args.component], params, args.eta, args.reps, checkpoints,
        seed0=args.seed, jobs=args.jobs,
    )
    with _open_out(args.output) as fh:
        fh.write("t,mean,stderr,reps\r\n")
        for st in diag.checkpoints:
            fh.write(f"{st.t:.17g},{st.empirical_mean:.17g},{st.std_error:.17g},{st.replications}\r\n")
    return 0


def _cmd_mean(args) -> int:
    params = _params_from_args(args)
    if args.grid:
        grid = [float(t) for t in args.grid.split(",")]
    else:
        grid = list(np.arange(0.0, args.t_end + 1e-9, 1.0))
    rows = analysis.mean_variance_study(
        ModelKind(args.model), params, args.reps, grid,
        seed0=args.seed, eta=args.eta, jobs=args.jobs,
    )
    with _open_out(args.output) as fh:
        fh.write("t,sample_mean,sample_std,theory_mean\r\n")
        for t, mean, std, theory in rows:
            th = "" if theory is None else f"{theory:.17g}"
            fh.write(f"{t:.17g},{mean:.17g},{std:.17g},{th}\r\n")
    return 0


def _cmd_equiv(args) -> int:
    params = _params_from_args(args)
    worst = 0.0
    for r in range(args.reps):
        stream = generate_stream(params, args.eta, args.seed + r, args.t_end)
        check = skorokhod_equivalence_check(params, stream)
        worst = max(worst, check.max_deviation)
        if not check.passed:
            print(f"equivalence FAILED at seed {args.seed + r}: max_deviation={check.max_deviation:.3g}")
            return 1
    print(f"equivalence OK over {args.reps} seeds: max_deviation={worst:.3g}")
    return 0


_DISPATCH = {
    "simulate": _cmd_simulate,
    "fluid": _cmd_fluid,
    "converge": _cmd_converge,
    "order": _cmd_order,
    "diagnose": _cmd_diagnose,
    "mean": _cmd_mean,
    "equiv": _cmd_equiv,
}


def parse_and_dispatch(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _DISPATCH[args.subcommand](args)
    except (ValueError, fluid_mod.StepTooLarge) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(parse_and_dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
