"""Command-line frontend.

Subcommands: crb, estimate, sweep-snr, sweep-sparsity, diagnose.
Exit codes: 0 success, 1 usage/IO/solver error, 2 no finite-variance
unbiased estimator exists for the queried point.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import estimators, matio, model, simulation
from .bounds import BiasSpec, crb_sparse_vector
from .estimators import SolverConfig
from .figures import render_sweep
from .model import ProblemInstance
from .simulation import ESTIMATOR_NAMES, TrialPlan, default_regularization

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


class CliError(Exception):
    pass


def _parse_dims(text: str) -> tuple[int, int]:
    try:
        m, p = (int(v) for v in text.split(","))
    except ValueError:
        raise CliError(f"--gen expects 'm,p', got {text!r}") from None
    if m <= 0 or p <= 0:
        raise CliError("--gen dimensions must be positive")
    return m, p


def _load_dictionary(args) -> np.ndarray:
    if args.dict is not None:
        return matio.read_matrix(args.dict)
    if args.gen is not None:
        m, p = _parse_dims(args.gen)
        return model.generate_dictionary(m, p, args.seed)
    raise CliError("a dictionary is required: pass --dict FILE or --gen m,p")


def _regularization(args, p: int) -> tuple[float, float]:
    if args.paper_rule:
        if args.sigma is None or args.s is None:
            raise CliError("--paper-rule needs --sigma and --s")
        return default_regularization(args.sigma, p, args.s)
    return args.tau, args.gamma


def cmd_crb(args) -> int:
    H = _load_dictionary(args)
    if args.sigma is None:
        raise CliError("--sigma is required")
    if args.s is None:
        raise CliError("--s is required")
    if args.alpha is not None:
        alpha = matio.read_vector(args.alpha)
    else:
        alpha = model.generate_sparse_param(H.shape[1], args.s, args.seed)
    instance = ProblemInstance(H=H, sigma=args.sigma, s=args.s, alpha0=alpha)
    result = crb_sparse_vector(instance)
    print(f"regime: {result.regime.value}")
    print(f"feasible: {result.feasible}")
    if not result.feasible:
        print("no finite-variance unbiased estimator")
        return EXIT_INFEASIBLE
    print(f"trace: {result.trace!r}")
    if args.bound_out:
        matio.write_matrix(args.bound_out, result.bound_matrix)
        print(f"bound matrix written to {args.bound_out}")
    return EXIT_OK


def cmd_estimate(args) -> int:
    H = _load_dictionary(args)
    y = matio.read_vector(args.y)
    name = args.estimator
    if name not in ESTIMATOR_NAMES:
        raise CliError(f"unknown estimator {name!r}; valid names: {', '.join(ESTIMATOR_NAMES)}")
    cfg = SolverConfig(tol=args.solver_tol)
    tau, gamma = _regularization(args, H.shape[1])
    if name == "oracle":
        if args.support is None:
            raise CliError("oracle needs --support i,j,... (zero-based indices)")
        support = [int(v) for v in args.support.split(",")] if args.support else []
        rec = estimators.oracle(H, y, support)
    elif name == "ls":
        rec = estimators.ls(H, y)
    elif name == "ml":
        if args.s is None:
            raise CliError("ml needs --s")
        rec = estimators.ml(H, y, args.s)
    elif name in ("bpdn", "gauss-bpdn"):
        if gamma is None:
            raise CliError(f"{name} needs --gamma or --paper-rule")
        fn = estimators.bpdn if name == "bpdn" else estimators.gauss_bpdn
        rec = fn(H, y, gamma, cfg)
    else:  # ds, gds
        if tau is None:
            raise CliError(f"{name} needs --tau or --paper-rule")
        fn = estimators.dantzig if name == "ds" else estimators.gds
        rec = fn(H, y, tau, cfg)
    print(f"support: {','.join(str(i) for i in rec.support) or '(empty)'}")
    print(f"solver_iterations: {rec.solver_iterations}")
    print(f"objective_residual: {rec.objective_residual!r}")
    if args.out:
        matio.write_vector(args.out, rec.estimate)
        print(f"estimate written to {args.out}")
    return EXIT_OK


def _build_plan(args) -> TrialPlan:
    if args.gen is None:
        raise CliError("sweeps need --gen m,p (dictionaries are drawn per plan)")
    m, p = _parse_dims(args.gen)
    names = tuple(args.estimators.split(",")) if args.estimators else ("oracle",)
    tau = gamma = None
    if not args.paper_rule:
        tau, gamma = args.tau, args.gamma
    return TrialPlan(
        m=m, p=p, s=args.s, sigma=args.sigma, trials=args.trials,
        base_seed=args.seed, estimator_names=names,
        dictionary_mode="fixed" if args.fixed_dict else "fresh_per_trial",
        tau=tau, gamma=gamma, solver=SolverConfig(tol=args.solver_tol),
    )


def _echo_report(report: simulation.SweepReport, label: str) -> None:
    print(f"{label:>12}  {'estimator':>10}  {'mse':>12}  {'std_err':>10}  "
          f"{'crb_trace':>12}  {'trials':>6}  {'fail':>4}")
    for r in report.rows:
        print(f"{r.sweep_value:12.6g}  {r.estimator:>10}  {r.mse:12.6g}  "
              f"{r.std_error:10.4g}  {r.crb_trace:12.6g}  {r.trials:6d}  {r.failures:4d}")


def _finish_sweep(report, args, xlabel: str) -> int:
    report.to_csv(args.out)
    _echo_report(report, xlabel)
    print(f"report written to {args.out}")
    if not args.no_plot:
        plot_path = args.plot or (str(args.out).rsplit(".", 1)[0] + ".png")
        render_sweep(report, plot_path, xlabel=xlabel)
        print(f"figure written to {plot_path}")
    return EXIT_OK


def cmd_sweep_snr(args) -> int:
    if args.s is None:
        raise CliError("--s is required")
    args.sigma = args.sigma if args.sigma is not None else 1.0  # plan placeholder; overridden per grid point
    plan = _build_plan(args)
    sigmas = [float(v) for v in args.sigmas.split(",")] if args.sigmas else None
    report = simulation.sweep_snr(plan, sigmas)
    return _finish_sweep(report, args, "sigma")


def cmd_sweep_sparsity(args) -> int:
    if args.sigma is None:
        args.sigma = simulation.DEFAULT_SPARSITY_SIGMA
    args.s = args.s if args.s is not None else 1  # plan placeholder; overridden per grid point
    plan = _build_plan(args)
    sizes = [int(v) for v in args.support_sizes.split(",")] if args.support_sizes else None
    report = simulation.sweep_sparsity(plan, sizes)
    return _finish_sweep(report, args, "support size")


def cmd_diagnose(args) -> int:
    H = _load_dictionary(args)
    if args.s is None:
        raise CliError("--s is required")
    norms = np.linalg.norm(H, axis=0)
    print(f"columns: {H.shape[1]}, rows: {H.shape[0]}")
    print(f"column norms: min {norms.min():.6g}, max {norms.max():.6g}")
    normalized = H / np.where(norms > 0, norms, 1.0)
    print(f"coherence: {model.coherence(normalized):.6g}")
    limit = min(2 * args.s, H.shape[1])
    witness = model.dependent_subset(H, limit)
    if witness is None:
        print(f"identifiable: yes (no dependent subset of size <= {limit})")
    else:
        print(f"identifiable: no (dependent columns: {','.join(map(str, witness))})")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sparsecrb",
        description="Covariance lower bounds and estimator benchmarks for sparse linear models.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, sweep=False):
        p.add_argument("--dict", help="dictionary matrix file")
        p.add_argument("--gen", metavar="m,p", help="generate a random unit-column dictionary")
        p.add_argument("--seed", type=int, default=0, help="seed for all randomized steps")
        p.add_argument("--sigma", type=float, help="noise standard deviation")
        p.add_argument("--s", type=int, help="maximum support size")
        p.add_argument("--tau", type=float, help="l-infinity constraint level for ds/gds")
        p.add_argument("--gamma", type=float, help="l1 penalty weight for bpdn")
        p.add_argument("--paper-rule", action="store_true",
                       help="derive tau and gamma from sigma via the default rule")
        p.add_argument("--solver-tol", type=float, default=1e-8)
        if sweep:
            p.add_argument("--trials", type=int, default=1000)
            p.add_argument("--estimators", help="comma-separated estimator names")
            p.add_argument("--out", required=True, help="output CSV path")
            p.add_argument("--fixed-dict", action="store_true",
                           help="reuse one dictionary across trials instead of redrawing")
            p.add_argument("--plot", help="figure output path (default: CSV path with .png)")
            p.add_argument("--no-plot", action="store_true", help="skip figure rendering")

    p_crb = sub.add_parser("crb", help="evaluate the unbiased covariance bound at a point")
    common(p_crb)
    p_crb.add_argument("--alpha", help="true parameter vector file")
    p_crb.add_argument("--bound-out", help="write the bound matrix to this file")
    p_crb.set_defaults(func=cmd_crb)

    p_est = sub.add_parser("estimate", help="run one estimator on given measurements")
    common(p_est)
    p_est.add_argument("--y", required=True, help="measurement vector file")
    p_est.add_argument("--estimator", required=True, help=f"one of: {', '.join(ESTIMATOR_NAMES)}")
    p_est.add_argument("--support", help="zero-based support indices for the oracle, e.g. 0,2")
    p_est.add_argument("--out", help="write the estimate to this vector file")
    p_est.set_defaults(func=cmd_estimate)

    p_snr = sub.add_parser("sweep-snr", help="Monte Carlo MSE vs noise level")
    common(p_snr, sweep=True)
    p_snr.add_argument("--sigmas", help="comma-separated sigma grid (default: 15 log-spaced in [1e-3, 1])")
    p_snr.set_defaults(func=cmd_sweep_snr)

    p_spar = sub.add_parser("sweep-sparsity", help="Monte Carlo MSE vs support size")
    common(p_spar, sweep=True)
    p_spar.add_argument("--support-sizes", help="comma-separated support sizes (default: 15 values in 1..30)")
    p_spar.set_defaults(func=cmd_sweep_sparsity)

    p_diag = sub.add_parser("diagnose", help="dictionary coherence and identifiability report")
    common(p_diag)
    p_diag.set_defaults(func=cmd_diagnose)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except (CliError, ValueError, OSError, estimators.SolverError,
            estimators.EnumerationCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def entrypoint() -> None:
    sys.exit(main())
