"""Monte Carlo comparison of estimator MSE against the covariance bound.

Per-trial seeds are mixed from (base_seed, trial index) through numpy's
SeedSequence, so reports depend only on the plan and never on execution
order.
"""
from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

from . import estimators
from .bounds import BiasSpec, crb_sparse_vector
from .estimators import (
    DEFAULT_CONFIG,
    EnumerationCapError,
    MLSolver,
    SolverConfig,
)
from .model import ProblemInstance, generate_dictionary, generate_sparse_param, simulate_measurements

ESTIMATOR_NAMES = ("oracle", "ls", "ml", "bpdn", "ds", "gds", "gauss-bpdn")

CSV_HEADER = ["sweep_value", "estimator", "mse", "std_error", "crb_trace", "trials", "failures"]

DEFAULT_SNR_GRID = tuple(np.logspace(0.0, -3.0, 15))
DEFAULT_SPARSITY_GRID = tuple(int(round(v)) for v in np.linspace(1, 30, 15))
DEFAULT_SPARSITY_SIGMA = 0.01


def default_regularization(sigma: float, p: int, s: int) -> tuple[float, float]:
    """Rule-of-thumb regularization levels: tau = 2 sigma sqrt(ln p),
    gamma = 4 sigma sqrt(ln(p - s)). Natural logarithms."""
    if p <= s:
        raise ValueError("p must exceed s")
    tau = 2.0 * sigma * math.sqrt(math.log(p))
    gamma = 4.0 * sigma * math.sqrt(math.log(p - s))
    return tau, gamma


@dataclass(frozen=True)
class TrialPlan:
    m: int
    p: int
    s: int
    sigma: float
    trials: int
    base_seed: int
    estimator_names: tuple[str, ...] = ("oracle",)
    dictionary_mode: str = "fresh_per_trial"  # or "fixed"
    tau: float | None = None     # None: derive from the sigma rule
    gamma: float | None = None
    solver: SolverConfig = DEFAULT_CONFIG
    ml_cap: int = estimators.ML_ENUMERATION_CAP

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.dictionary_mode not in ("fresh_per_trial", "fixed"):
            raise ValueError(f"unknown dictionary_mode {self.dictionary_mode!r}")
        unknown = set(self.estimator_names) - set(ESTIMATOR_NAMES)
        if unknown:
            raise ValueError(f"unknown estimators {sorted(unknown)}; valid: {ESTIMATOR_NAMES}")

    def regularization(self) -> tuple[float, float]:
        tau, gamma = default_regularization(self.sigma, self.p, self.s)
        return (self.tau if self.tau is not None else tau,
                self.gamma if self.gamma is not None else gamma)


@dataclass(frozen=True)
class EstimatorStats:
    mse: float
    std_error: float
    trials: int
    failures: int


@dataclass(frozen=True)
class MseResult:
    per_estimator: dict[str, EstimatorStats]
    crb_trace: float


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    estimator: str
    mse: float
    std_error: float
    crb_trace: float
    trials: int
    failures: int


@dataclass(frozen=True)
class SweepReport:
    rows: tuple[SweepRow, ...]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(CSV_HEADER)
            for r in self.rows:
                writer.writerow([repr(r.sweep_value), r.estimator, repr(r.mse),
                                 repr(r.std_error), repr(r.crb_trace), r.trials, r.failures])

    @classmethod
    def from_csv(cls, path) -> "SweepReport":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != CSV_HEADER:
                raise ValueError(f"unexpected CSV header {header}")
            rows = tuple(
                SweepRow(float(a), b, float(c), float(d), float(e), int(f), int(g))
                for a, b, c, d, e, f, g in reader
            )
        return cls(rows=rows)


def _trial_seeds(base_seed: int, trial: int) -> tuple[int, int, int]:
    ss = np.random.SeedSequence(entropy=base_seed, spawn_key=(trial,))
    a, b, c = ss.generate_state(3, dtype=np.uint64)
    return int(a), int(b), int(c)


def _run_estimator(name: str, H, y, alpha0, plan: TrialPlan,
                   tau: float, gamma: float, ml_solver: MLSolver | None):
    if name == "oracle":
        return estimators.oracle(H, y, np.nonzero(alpha0)[0])
    if name == "ls":
        return estimators.ls(H, y)
    if name == "ml":
        if ml_solver is not None:
            return ml_solver.solve(y)
        return estimators.ml(H, y, plan.s, cap=plan.ml_cap)
    if name == "bpdn":
        return estimators.bpdn(H, y, gamma, plan.solver)
    if name == "ds":
        return estimators.dantzig(H, y, tau, plan.solver)
    if name == "gds":
        return estimators.gds(H, y, tau, plan.solver)
    if name == "gauss-bpdn":
        return estimators.gauss_bpdn(H, y, gamma, plan.solver)
    raise ValueError(f"unknown estimator {name!r}")


def estimate_mse(plan: TrialPlan) -> MseResult:
    """Per-estimator MSE (sample mean and standard error of the squared
    error over trials) and the mean bound trace across the trial supports.

    Failed trials are excluded per estimator, counted, and reported with a
    warning rather than averaged silently.
    """
    if "ml" in plan.estimator_names and math.comb(plan.p, plan.s) > plan.ml_cap:
        raise EnumerationCapError(
            f"C({plan.p},{plan.s}) exceeds the ML enumeration cap {plan.ml_cap}"
        )
    tau, gamma = plan.regularization()
    fixed_H = None
    fixed_ml = None
    if plan.dictionary_mode == "fixed":
        fixed_H = generate_dictionary(plan.m, plan.p, plan.base_seed)
        if "ml" in plan.estimator_names:
            fixed_ml = MLSolver(fixed_H, plan.s, cap=plan.ml_cap)
    sq_errors: dict[str, list[float]] = {n: [] for n in plan.estimator_names}
    failures: dict[str, int] = {n: 0 for n in plan.estimator_names}
    crb_sum = 0.0
    for t in range(plan.trials):
        dict_seed, param_seed, noise_seed = _trial_seeds(plan.base_seed, t)
        if fixed_H is not None:
            H, ml_solver = fixed_H, fixed_ml
        else:
            H = generate_dictionary(plan.m, plan.p, dict_seed)
            ml_solver = None
        alpha0 = generate_sparse_param(plan.p, plan.s, param_seed)
        y = simulate_measurements(H, alpha0, plan.sigma, noise_seed)
        if plan.sigma > 0:
            instance = ProblemInstance(H=H, sigma=plan.sigma, s=plan.s, alpha0=alpha0)
            bound = crb_sparse_vector(instance, BiasSpec.unbiased(plan.p, plan.s))
            crb_sum += bound.trace
        # noiseless runs keep crb_sum at 0: the bound trace scales as sigma^2
        for name in plan.estimator_names:
            try:
                rec = _run_estimator(name, H, y, alpha0, plan, tau, gamma, ml_solver)
            except Exception as exc:  # noqa: BLE001 - per-trial failure is data
                failures[name] += 1
                warnings.warn(f"estimator {name!r} failed in trial {t}: {exc}")
                continue
            err = rec.estimate - alpha0
            sq_errors[name].append(float(err @ err))
    per = {}
    for name in plan.estimator_names:
        errs = np.array(sq_errors[name])
        if errs.size == 0:
            per[name] = EstimatorStats(math.nan, math.nan, 0, failures[name])
            continue
        mse = float(errs.mean())
        se = float(errs.std(ddof=1) / math.sqrt(errs.size)) if errs.size > 1 else 0.0
        per[name] = EstimatorStats(mse, se, int(errs.size), failures[name])
    return MseResult(per_estimator=per, crb_trace=crb_sum / plan.trials)


def _rows_for(sweep_value: float, result: MseResult) -> list[SweepRow]:
    rows = []
    for name in sorted(result.per_estimator):
        st = result.per_estimator[name]
        rows.append(SweepRow(sweep_value=float(sweep_value), estimator=name,
                             mse=st.mse, std_error=st.std_error,
                             crb_trace=result.crb_trace, trials=st.trials,
                             failures=st.failures))
    return rows


def sweep_snr(plan: TrialPlan, sigmas=None) -> SweepReport:
    """Rerun the Monte Carlo experiment over a grid of noise levels; the
    regularization rule is re-derived per level unless fixed in the plan."""
    grid = DEFAULT_SNR_GRID if sigmas is None else tuple(float(x) for x in sigmas)
    if not grid:
        raise ValueError("sigma grid must be non-empty")
    rows: list[SweepRow] = []
    for sigma in grid:
        result = estimate_mse(replace(plan, sigma=float(sigma)))
        rows.extend(_rows_for(sigma, result))
    rows.sort(key=lambda r: (r.sweep_value, r.estimator))
    return SweepReport(rows=tuple(rows))


def sweep_sparsity(plan: TrialPlan, support_sizes=None) -> SweepReport:
    """Rerun the experiment over a grid of support sizes at fixed sigma.

    The exhaustive-ML estimator is dropped (with a warning) for sizes whose
    enumeration exceeds the cap.
    """
    grid = DEFAULT_SPARSITY_GRID if support_sizes is None else tuple(int(v) for v in support_sizes)
    if not grid:
        raise ValueError("support-size grid must be non-empty")
    if any(s >= plan.p for s in grid):
        raise ValueError("all support sizes must be smaller than p")
    rows: list[SweepRow] = []
    for s in grid:
        names = plan.estimator_names
        if "ml" in names and math.comb(plan.p, s) > plan.ml_cap:
            warnings.warn(f"ml excluded at s={s}: enumeration exceeds cap {plan.ml_cap}")
            names = tuple(n for n in names if n != "ml")
        result = estimate_mse(replace(plan, s=s, estimator_names=names))
        rows.extend(_rows_for(s, result))
    rows.sort(key=lambda r: (r.sweep_value, r.estimator))
    return SweepReport(rows=tuple(rows))
