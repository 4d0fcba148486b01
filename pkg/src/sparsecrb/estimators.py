"""Estimators for sparse linear-Gaussian observations.

Support-aware least squares (oracle), plain least squares, exhaustive
maximum likelihood over supports, an l1-penalized quadratic program solved
by coordinate descent, an l1-minimization linear program, and the
two-stage refits of both convex estimators.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, islice
from math import comb

import numpy as np
from scipy.optimize import linprog

from .linalg import LinearDependenceError, pseudoinverse

ML_ENUMERATION_CAP = 5_000_000

# entries of a screener output with magnitude above this fraction of the
# largest entry count as support for the refit stage
SUPPORT_EPSILON = 1e-8


class SolverError(RuntimeError):
    """Solver failed to produce a certified solution."""

    def __init__(self, message: str, best: np.ndarray | None = None):
        super().__init__(message)
        self.best = best


class EnumerationCapError(ValueError):
    """Exhaustive support enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class SolverConfig:
    tol: float = 1e-8
    max_iterations: int = 10**6

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError("tol must be positive")


DEFAULT_CONFIG = SolverConfig()


@dataclass
class EstimateRecord:
    estimate: np.ndarray
    support: tuple[int, ...]
    solver_iterations: int = 0
    objective_residual: float = 0.0


def _record(estimate: np.ndarray, iterations: int = 0, residual: float = 0.0) -> EstimateRecord:
    support = tuple(int(i) for i in np.nonzero(estimate)[0])
    return EstimateRecord(estimate=estimate, support=support,
                          solver_iterations=iterations, objective_residual=residual)


def soft_threshold(v, t: float) -> np.ndarray:
    """Componentwise sign(v) * max(|v| - t, 0)."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def oracle(H, y, support) -> EstimateRecord:
    """Least squares restricted to a given support, zero elsewhere."""
    H = np.asarray(H, dtype=float)
    y = np.asarray(y, dtype=float)
    support = sorted(int(i) for i in support)
    p = H.shape[1]
    if len(set(support)) != len(support):
        raise ValueError("support indices must be distinct")
    if support and (support[0] < 0 or support[-1] >= p):
        raise ValueError("support index out of range")
    alpha = np.zeros(p)
    if support:
        Hs = H[:, support]
        if np.linalg.matrix_rank(Hs) < len(support):
            raise LinearDependenceError("support columns are linearly dependent")
        alpha[support], *_ = np.linalg.lstsq(Hs, y, rcond=None)
    return _record(alpha)


def ls(H, y) -> EstimateRecord:
    """Unconstrained least squares; requires full column rank."""
    H = np.asarray(H, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.linalg.matrix_rank(H) < H.shape[1]:
        raise LinearDependenceError("H is rank deficient; least squares is not unique")
    alpha, *_ = np.linalg.lstsq(H, y, rcond=None)
    return _record(alpha)


class MLSolver:
    """Exhaustive maximum-likelihood search over all size-s supports.

    Precomputes an orthonormal basis per support (batched QR) when memory
    permits, so repeated solves against the same design are fast; otherwise
    streams the enumeration per solve.
    """

    _PRECOMPUTE_BYTES = 500_000_000
    _BATCH = 20_000

    def __init__(self, H, s: int, cap: int = ML_ENUMERATION_CAP):
        self.H = np.asarray(H, dtype=float)
        self.s = int(s)
        m, p = self.H.shape
        n_supports = comb(p, s)
        if n_supports > cap:
            raise EnumerationCapError(
                f"C({p},{s}) = {n_supports} supports exceeds the enumeration cap {cap}"
            )
        self.n_supports = n_supports
        self._cache = None
        if n_supports * m * s * 8 <= self._PRECOMPUTE_BYTES:
            self._cache = list(self._batches())

    def _batches(self):
        m = self.H.shape[0]
        combs = combinations(range(self.H.shape[1]), self.s)
        while True:
            idx = np.array(list(islice(combs, self._BATCH)), dtype=int)
            if idx.size == 0:
                return
            sub = self.H[:, idx].transpose(1, 0, 2)  # (nsub, m, s)
            Q, _ = np.linalg.qr(sub)
            yield idx, Q

    def solve(self, y) -> EstimateRecord:
        y = np.asarray(y, dtype=float)
        ynorm2 = float(y @ y)
        best_resid = np.inf
        best_support = None
        batches = self._cache if self._cache is not None else self._batches()
        for idx, Q in batches:
            proj = np.einsum("kms,m->ks", Q, y)
            resid = ynorm2 - np.einsum("ks,ks->k", proj, proj)
            # lexicographically first support within an absolute 1e-12 tie band
            k = int(np.argmax(resid <= resid.min() + 1e-12))
            if resid[k] < best_resid - 1e-12 or best_support is None:
                best_resid = float(resid[k])
                best_support = idx[k]
        rec = oracle(self.H, y, best_support)
        rec.solver_iterations = self.n_supports
        return rec


def ml(H, y, s: int, cap: int = ML_ENUMERATION_CAP) -> EstimateRecord:
    """Maximum likelihood under the s-sparsity constraint by exhaustive
    enumeration of supports; ties broken by lexicographically smallest
    support."""
    return MLSolver(H, s, cap=cap).solve(y)


def _bpdn_certificate(g, alpha, gamma: float) -> float:
    """Max violation of the l1 subgradient optimality conditions.

    g is the negative gradient of the quadratic term, H^T (y - H alpha).
    """
    viol_zero = np.maximum(np.abs(g) - gamma, 0.0)
    viol_active = np.abs(g - gamma * np.sign(alpha))
    return float(np.max(np.where(alpha != 0.0, viol_active, viol_zero), initial=0.0))


def bpdn(H, y, gamma: float, cfg: SolverConfig = DEFAULT_CONFIG) -> EstimateRecord:
    """l2 fit plus gamma * l1 penalty, solved by cyclic coordinate descent.

    Termination is certified by the subgradient optimality residual, which
    is reported on the returned record.
    """
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    H = np.asarray(H, dtype=float)
    y = np.asarray(y, dtype=float)
    p = H.shape[1]
    G = H.T @ H
    b = H.T @ y
    diag = np.diag(G).copy()
    alpha = np.zeros(p)
    g = b.copy()  # H^T (y - H alpha)
    active = np.arange(p)
    sweeps = 0
    while sweeps < cfg.max_iterations:
        sweeps += 1
        for j in active:
            if diag[j] == 0.0:
                continue
            rho = g[j] + diag[j] * alpha[j]
            new = np.sign(rho) * max(abs(rho) - gamma, 0.0) / diag[j]
            delta = new - alpha[j]
            if delta != 0.0:
                alpha[j] = new
                g -= G[:, j] * delta
        # the certificate is global (g tracks every coordinate), so it is a
        # valid stopping test even during active-set sweeps
        cert = _bpdn_certificate(g, alpha, gamma)
        if cert <= cfg.tol:
            return _record(alpha, sweeps, cert)
        if sweeps % 5 == 0:
            # refresh the active set; coordinates violating the certificate
            # have |g| > gamma and are always re-included
            active = np.nonzero((alpha != 0.0) | (np.abs(g) >= gamma - cfg.tol))[0]
    raise SolverError(
        f"coordinate descent did not certify within {cfg.max_iterations} sweeps "
        f"(residual {_bpdn_certificate(g, alpha, gamma):.3e})",
        best=alpha,
    )


def dantzig(H, y, tau: float, cfg: SolverConfig = DEFAULT_CONFIG) -> EstimateRecord:
    """Minimum l1 norm subject to an l-infinity bound tau on H^T residual
    correlations, solved as a linear program over the positive/negative
    split alpha = a+ - a-.

    The program is always feasible for tau >= 0: the point (H^T H)^+ H^T y
    zeroes the correlation vector, since H^T y lies in the range of H^T H.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    H = np.asarray(H, dtype=float)
    y = np.asarray(y, dtype=float)
    p = H.shape[1]
    G = H.T @ H
    beta = H.T @ y
    if np.max(np.abs(beta), initial=0.0) <= tau:
        return _record(np.zeros(p))
    A_ub = np.block([[G, -G], [-G, G]])
    b_ub = np.concatenate([tau + beta, tau - beta])
    c = np.ones(2 * p)
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=(0, None), method="highs")
    if not res.success:
        raise SolverError(f"linear program failed: {res.message} (status {res.status})")
    z = res.x
    alpha = z[:p] - z[p:]
    # scrub LP round-off so the reported support is meaningful
    alpha[np.abs(alpha) <= SUPPORT_EPSILON * np.max(np.abs(alpha), initial=0.0)] = 0.0
    feas = max(0.0, float(np.max(np.abs(beta - G @ alpha))) - tau)
    if feas > cfg.tol * max(1.0, tau):
        raise SolverError(f"linear program returned an infeasible point (violation {feas:.3e})",
                          best=alpha)
    iters = int(res.nit) if res.nit is not None else 0
    return _record(alpha, iters, feas)


def _screened_ls(H, y, screen: EstimateRecord) -> EstimateRecord:
    """Least-squares refit on the support reported by a screener."""
    H = np.asarray(H, dtype=float)
    y = np.asarray(y, dtype=float)
    mags = np.abs(screen.estimate)
    top = np.max(mags, initial=0.0)
    support = np.nonzero(mags > SUPPORT_EPSILON * top)[0] if top > 0 else np.array([], dtype=int)
    try:
        rec = oracle(H, y, support)
    except LinearDependenceError:
        # dependent screener support: fall back to minimum-norm LS on it
        alpha = np.zeros(H.shape[1])
        alpha[support] = pseudoinverse(H[:, support]) @ y
        rec = _record(alpha)
    rec.solver_iterations = screen.solver_iterations
    rec.objective_residual = screen.objective_residual
    return rec


def gds(H, y, tau: float, cfg: SolverConfig = DEFAULT_CONFIG) -> EstimateRecord:
    """Two-stage estimator: l1-minimization screener, then least squares on
    its support."""
    return _screened_ls(H, y, dantzig(H, y, tau, cfg))


def gauss_bpdn(H, y, gamma: float, cfg: SolverConfig = DEFAULT_CONFIG) -> EstimateRecord:
    """Two-stage estimator with the l1-penalized screener."""
    return _screened_ls(H, y, bpdn(H, y, gamma, cfg))
