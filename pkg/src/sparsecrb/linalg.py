"""Dense linear-algebra kernels shared by the bound and estimator code.

Every rank decision in the package goes through the same SVD-based cutoff,
so the pseudoinverse, range tests, projectors and spark computations agree
on what counts as numerically zero.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Relative factor applied to sigma_max * max(rows, cols) when no explicit
# cutoff is supplied.
DEFAULT_RANK_RTOL = 1e-10


class LinearDependenceError(ValueError):
    """Raised when an operation requires linearly independent columns."""


@dataclass(frozen=True)
class RankTolerance:
    """Numerical rank cutoff for SVD-based kernels.

    ``rel_tol=None`` selects the default rule
    ``1e-10 * sigma_max * max(rows, cols)``; an explicit nonnegative value
    is used as the absolute singular-value cutoff.
    """

    rel_tol: float | None = None

    def __post_init__(self):
        if self.rel_tol is not None and self.rel_tol < 0:
            raise ValueError("rel_tol must be nonnegative")

    def cutoff(self, singular_values: np.ndarray, shape: tuple[int, int]) -> float:
        if self.rel_tol is not None:
            return self.rel_tol
        smax = float(singular_values[0]) if singular_values.size else 0.0
        return DEFAULT_RANK_RTOL * smax * max(shape)

    def relative(self, shape: tuple[int, int]) -> float:
        """Relative residual threshold for range-inclusion tests."""
        if self.rel_tol is not None:
            return self.rel_tol
        return DEFAULT_RANK_RTOL * max(shape)


DEFAULT_TOL = RankTolerance()


def _as_matrix(M) -> np.ndarray:
    M = np.asarray(M, dtype=float)
    if M.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return M


def pseudoinverse(M, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse via SVD with singular-value cutoff."""
    M = _as_matrix(M)
    if min(M.shape) == 0:
        return np.zeros((M.shape[1], M.shape[0]))
    U, s, Vt = np.linalg.svd(M, full_matrices=False)
    cut = tol.cutoff(s, M.shape)
    inv = np.where(s > cut, 1.0 / np.where(s > cut, s, 1.0), 0.0)
    return (Vt.T * inv) @ U.T


def numerical_rank(M, tol: RankTolerance = DEFAULT_TOL) -> int:
    M = _as_matrix(M)
    if min(M.shape) == 0:
        return 0
    s = np.linalg.svd(M, compute_uv=False)
    return int(np.sum(s > tol.cutoff(s, M.shape)))


def orthonormal_range_basis(M, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis of the column space; column count = numerical rank."""
    M = _as_matrix(M)
    if min(M.shape) == 0:
        return np.zeros((M.shape[0], 0))
    U, s, _ = np.linalg.svd(M, full_matrices=False)
    r = int(np.sum(s > tol.cutoff(s, M.shape)))
    return U[:, :r]


def projector_onto_columns(M, tol: RankTolerance = DEFAULT_TOL) -> np.ndarray:
    """Orthogonal projector onto the column space of a full-column-rank M."""
    M = _as_matrix(M)
    if numerical_rank(M, tol) < M.shape[1]:
        raise LinearDependenceError(
            f"columns of {M.shape[0]}x{M.shape[1]} matrix are linearly dependent"
        )
    Q = orthonormal_range_basis(M, tol)
    return Q @ Q.T


def range_inclusion(Asub, Bsup, tol: RankTolerance = DEFAULT_TOL) -> bool:
    """True iff the column space of Asub lies inside that of Bsup.

    Each column of Asub is projected onto an orthonormal basis of Bsup's
    range; the residual must be small relative to the column norm.
    """
    Asub = _as_matrix(Asub)
    Bsup = _as_matrix(Bsup)
    if Asub.shape[0] != Bsup.shape[0]:
        raise ValueError("row counts must agree")
    Q = orthonormal_range_basis(Bsup, tol)
    resid = Asub - Q @ (Q.T @ Asub)
    col_norms = np.linalg.norm(Asub, axis=0)
    resid_norms = np.linalg.norm(resid, axis=0)
    # generous slack over the rank cutoff: projections accumulate roundoff
    thresh = max(tol.relative(Bsup.shape), 1e-9)
    return bool(np.all(resid_norms <= thresh * np.maximum(col_norms, 1e-300)))


def symmetrize(M) -> np.ndarray:
    M = _as_matrix(M)
    return 0.5 * (M + M.T)


def is_psd(M, tol: float = 1e-8) -> bool:
    """True iff the smallest eigenvalue of (M + M^T)/2 is >= -tol."""
    M = _as_matrix(M)
    if M.shape[0] != M.shape[1]:
        raise ValueError("is_psd requires a square matrix")
    if M.shape[0] == 0:
        return True
    w = np.linalg.eigvalsh(symmetrize(M))
    return bool(w[0] >= -tol)
