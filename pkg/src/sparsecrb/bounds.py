"""Constrained Cramer-Rao bounds for sparse linear-Gaussian models.

Covers the general bound for a prescribed bias over a feasible subspace,
its specialization to s-sparse coefficient vectors (with the dichotomy
between maximal and non-maximal support), the signal-space variant, the
coherence-based bracketing of the oracle trace, and the estimator that
attains the bound when it is achievable.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .linalg import DEFAULT_TOL, LinearDependenceError, RankTolerance
from .model import ProblemInstance, SignalModel


class SupportRegime(enum.Enum):
    NON_MAXIMAL_SUPPORT = "non_maximal_support"
    MAXIMAL_SUPPORT = "maximal_support"


@dataclass(frozen=True)
class FeasibleBasis:
    """Orthonormal basis U of the feasible subspace at a parameter point.

    At a point with exactly s nonzeros the feasible directions are the
    standard basis vectors on the support; below s nonzeros every direction
    is feasible and U is the identity.
    """

    U: np.ndarray
    maximal_support: bool
    support: tuple[int, ...]

    @property
    def regime(self) -> SupportRegime:
        if self.maximal_support:
            return SupportRegime.MAXIMAL_SUPPORT
        return SupportRegime.NON_MAXIMAL_SUPPORT


@dataclass(frozen=True)
class BiasSpec:
    """Prescribed bias-gradient-times-basis matrix; zero means unbiased."""

    BU: np.ndarray
    description: str = ""

    @classmethod
    def unbiased(cls, rows: int, cols: int) -> "BiasSpec":
        return cls(np.zeros((rows, cols)), "unbiased")


@dataclass(frozen=True)
class BoundResult:
    """Covariance lower bound, or an infeasibility verdict.

    ``feasible=False`` means no finite-variance estimator with the requested
    bias gradient exists at this point; in that case the matrix and trace
    are absent.
    """

    feasible: bool
    regime: SupportRegime
    bound_matrix: np.ndarray | None = None
    trace: float | None = field(default=None)

    @classmethod
    def infeasible(cls, regime: SupportRegime) -> "BoundResult":
        return cls(feasible=False, regime=regime)

    @classmethod
    def from_matrix(cls, M: np.ndarray, regime: SupportRegime) -> "BoundResult":
        M = linalg.symmetrize(M)
        return cls(feasible=True, regime=regime, bound_matrix=M, trace=float(np.trace(M)))


def fisher_information(H, sigma: float) -> np.ndarray:
    """FIM of the linear model with white Gaussian noise: H^T H / sigma^2."""
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    H = np.asarray(H, dtype=float)
    return (H.T @ H) / sigma**2


def feasible_basis(alpha, s: int) -> FeasibleBasis:
    """Feasible-subspace basis at alpha for the s-sparse constraint set."""
    alpha = np.asarray(alpha, dtype=float)
    p = alpha.shape[0]
    support = tuple(int(i) for i in np.nonzero(alpha)[0])
    if len(support) > s:
        raise ValueError(f"alpha has {len(support)} nonzeros, more than s={s}")
    if len(support) == s:
        U = np.zeros((p, s))
        U[list(support), np.arange(s)] = 1.0
        return FeasibleBasis(U=U, maximal_support=True, support=support)
    return FeasibleBasis(U=np.eye(p), maximal_support=False, support=support)


def crb_general(basis: FeasibleBasis, bias: BiasSpec, J, tol: RankTolerance = DEFAULT_TOL) -> BoundResult:
    """Covariance lower bound (U+BU)(U^T J U)^+ (U+BU)^T for a prescribed
    bias over the feasible subspace, gated on the range condition that makes
    a finite-variance estimator possible."""
    J = np.asarray(J, dtype=float)
    U = basis.U
    BU = np.asarray(bias.BU, dtype=float)
    if J.shape[0] != J.shape[1] or J.shape[0] != U.shape[0]:
        raise ValueError("J must be square with side equal to the ambient dimension")
    if BU.shape != U.shape:
        raise ValueError(f"bias matrix shape {BU.shape} does not match basis shape {U.shape}")
    M = U + BU
    P = U @ U.T
    if not linalg.range_inclusion(U @ M.T, P @ J @ P, tol):
        return BoundResult.infeasible(basis.regime)
    core = linalg.pseudoinverse(U.T @ J @ U, tol)
    return BoundResult.from_matrix(M @ core @ M.T, basis.regime)


def _support_gram_inverse(H, support) -> np.ndarray:
    Hs = np.asarray(H, dtype=float)[:, list(support)]
    gram = Hs.T @ Hs
    s = len(support)
    if s and np.linalg.matrix_rank(gram) < s:
        raise LinearDependenceError("columns of H on the support are linearly dependent")
    return np.linalg.inv(gram) if s else np.zeros((0, 0))


def crb_sparse_vector(instance: ProblemInstance, bias: BiasSpec | None = None,
                      tol: RankTolerance = DEFAULT_TOL) -> BoundResult:
    """Covariance lower bound for estimating an s-sparse coefficient vector.

    Maximal support: sigma^2 (U+BU) (Hs^T Hs)^-1 (U+BU)^T, always feasible.
    Non-maximal: sigma^2 (I+B) (H^T H)^+ (I+B)^T, feasible only when the
    null space of H lies in the null space of I+B (for the unbiased case
    this requires H to have full column rank).
    """
    if instance.alpha0 is None:
        raise ValueError("instance.alpha0 is required for the sparse-vector bound")
    H = instance.H
    sigma2 = instance.sigma**2
    basis = feasible_basis(instance.alpha0, instance.s)
    if bias is None:
        bias = BiasSpec.unbiased(*basis.U.shape)
    BU = np.asarray(bias.BU, dtype=float)
    if BU.shape != basis.U.shape:
        raise ValueError(f"bias matrix shape {BU.shape} does not match basis shape {basis.U.shape}")
    M = basis.U + BU
    if basis.maximal_support:
        core = _support_gram_inverse(H, basis.support)
        return BoundResult.from_matrix(sigma2 * M @ core @ M.T, basis.regime)
    # non-maximal: M = I + B; a finite-variance estimator needs
    # N(H) within N(I+B), equivalently R(M^T) within R(H^T)
    if not linalg.range_inclusion(M.T, H.T, tol):
        return BoundResult.infeasible(basis.regime)
    core = linalg.pseudoinverse(H.T @ H, tol)
    return BoundResult.from_matrix(sigma2 * M @ core @ M.T, basis.regime)


def unbiased_estimator_exists(H, alpha, s: int, tol: RankTolerance = DEFAULT_TOL) -> bool:
    """Whether a finite-variance estimator unbiased over the constraint set
    is not ruled out at alpha."""
    H = np.asarray(H, dtype=float)
    basis = feasible_basis(alpha, s)
    if basis.maximal_support:
        return True
    return linalg.numerical_rank(H, tol) == H.shape[1]


def coherence_sandwich(mu: float, s: int, sigma: float) -> tuple[float, float | None]:
    """Bracketing of the maximal-support unbiased bound trace by coherence:
    s*sigma^2/(1+s*mu) <= trace <= s*sigma^2/(1-s*mu), upper defined only
    when s*mu < 1."""
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    lower = s * sigma**2 / (1.0 + s * mu)
    upper = s * sigma**2 / (1.0 - s * mu) if s * mu < 1.0 else None
    return lower, upper


def crb_signal(model: SignalModel, sigma: float, tol: RankTolerance = DEFAULT_TOL) -> BoundResult:
    """Covariance lower bound for unbiased estimation of the signal x = D @ alpha.

    Non-maximal representation: sigma^2 (A^T A)^-1. Maximal: sigma^2
    (P A^T A P)^+ with P the orthogonal projector onto the span of the
    dictionary atoms participating in the representation.
    """
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if model.representation is None:
        raise ValueError("model.representation is required for the signal-space bound")
    A, D = model.A, model.D
    if linalg.numerical_rank(A, tol) < A.shape[1]:
        raise LinearDependenceError("A must have full column rank")
    support = np.nonzero(model.representation)[0]
    sigma2 = sigma**2
    if len(support) < model.s:
        return BoundResult.from_matrix(
            sigma2 * np.linalg.inv(A.T @ A), SupportRegime.NON_MAXIMAL_SUPPORT
        )
    Dx = D[:, support]
    P = linalg.projector_onto_columns(Dx, tol)
    return BoundResult.from_matrix(
        sigma2 * linalg.pseudoinverse(P @ A.T @ A @ P, tol),
        SupportRegime.MAXIMAL_SUPPORT,
    )


def efficient_estimate(instance: ProblemInstance, basis: FeasibleBasis,
                       bias: BiasSpec, y, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Evaluate the estimator that attains the bound when it is achievable:
    alpha0 + (U+BU)(U^T J U)^+ U^T score(y), with the bias value at the
    point taken as zero (the unbiased case)."""
    if instance.alpha0 is None:
        raise ValueError("instance.alpha0 is required")
    H = instance.H
    y = np.asarray(y, dtype=float)
    J = fisher_information(H, instance.sigma)
    U = basis.U
    M = U + np.asarray(bias.BU, dtype=float)
    score = H.T @ (y - H @ instance.alpha0) / instance.sigma**2
    core = linalg.pseudoinverse(U.T @ J @ U, tol)
    return instance.alpha0 + M @ core @ (U.T @ score)
