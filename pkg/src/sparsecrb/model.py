"""Problem definition, dictionary diagnostics and random instance generation.

Random draws use the counter-based Philox generator so that results are
bit-reproducible across platforms for a given seed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, islice

import numpy as np

from .linalg import DEFAULT_TOL, RankTolerance


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


@dataclass(frozen=True)
class SparkValue:
    """Smallest number of linearly dependent columns; math.inf if none found
    up to the search cap."""

    value: float

    @property
    def finite(self) -> bool:
        return math.isfinite(self.value)


@dataclass
class ProblemInstance:
    """A sparse linear-Gaussian observation problem: y = H @ alpha0 + noise.

    ``alpha0`` may be omitted for bound-only queries that do not need the
    true parameter.
    """

    H: np.ndarray
    sigma: float
    s: int
    alpha0: np.ndarray | None = None

    def __post_init__(self):
        self.H = np.asarray(self.H, dtype=float)
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.s <= 0:
            raise ValueError("s must be positive")
        if self.s >= self.H.shape[1]:
            raise ValueError("s must be smaller than the number of columns")
        if self.alpha0 is not None:
            self.alpha0 = np.asarray(self.alpha0, dtype=float)
            if self.alpha0.shape != (self.H.shape[1],):
                raise ValueError("alpha0 length must equal the column count of H")
            if np.count_nonzero(self.alpha0) > self.s:
                raise ValueError("alpha0 has more than s nonzero entries")


@dataclass
class SignalModel:
    """Signal-space model x = D @ alpha with measurements y = A @ x + noise.

    ``representation`` is the unique sparse coefficient vector of the signal
    of interest; finding it is NP-hard in general, so it is supplied by the
    caller rather than computed.
    """

    A: np.ndarray
    D: np.ndarray
    s: int
    representation: np.ndarray | None = None

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.D = np.asarray(self.D, dtype=float)
        if self.A.shape[1] != self.D.shape[0]:
            raise ValueError("A columns must match D rows")
        if self.s <= 0:
            raise ValueError("s must be positive")
        if self.representation is not None:
            self.representation = np.asarray(self.representation, dtype=float)
            if self.representation.shape != (self.D.shape[1],):
                raise ValueError("representation length must equal the column count of D")
            if np.count_nonzero(self.representation) > self.s:
                raise ValueError("representation has more than s nonzero entries")


def dependent_subset(M, limit: int, tol: RankTolerance = DEFAULT_TOL) -> tuple[int, ...] | None:
    """First (smallest, then lexicographic) rank-deficient column subset of
    size <= limit, or None if every such subset has full rank.

    Exhaustive search; subsets are tested in batches with a stacked SVD.
    """
    M = np.asarray(M, dtype=float)
    p = M.shape[1]
    if limit > p:
        raise ValueError("limit cannot exceed the number of columns")
    scale = np.linalg.norm(M, 2) if M.size else 0.0
    cut = max(tol.cutoff(np.array([scale]), M.shape), 0.0)
    for k in range(1, limit + 1):
        if k > M.shape[0]:
            # more columns than rows: any such subset is dependent
            return tuple(range(k))
        combs = combinations(range(p), k)
        while True:
            idx = np.array(list(islice(combs, 4096)), dtype=int)
            if idx.size == 0:
                break
            sub = M[:, idx].transpose(1, 0, 2)  # (nsub, m, k)
            sv = np.linalg.svd(sub, compute_uv=False)
            hits = np.nonzero(sv[:, -1] <= cut)[0]
            if hits.size:
                return tuple(int(i) for i in idx[hits[0]])
    return None


def spark(M, limit: int, tol: RankTolerance = DEFAULT_TOL) -> SparkValue:
    """Smallest k <= limit such that some k columns are linearly dependent;
    math.inf if none exists up to the search cap."""
    witness = dependent_subset(M, limit, tol)
    return SparkValue(float(len(witness)) if witness is not None else math.inf)


def coherence(M) -> float:
    """Maximum absolute inner product between distinct columns.

    Requires unit-norm columns; raises naming the first offending column.
    """
    M = np.asarray(M, dtype=float)
    norms = np.linalg.norm(M, axis=0)
    bad = np.nonzero(np.abs(norms - 1.0) > 1e-8)[0]
    if bad.size:
        raise ValueError(
            f"column {bad[0]} is not unit-norm (norm {norms[bad[0]]:.6g})"
        )
    G = np.abs(M.T @ M)
    np.fill_diagonal(G, 0.0)
    return float(G.max()) if G.size else 0.0


def identifiable(M, s: int, tol: RankTolerance = DEFAULT_TOL) -> bool:
    """True iff no subset of at most 2s columns is linearly dependent."""
    M = np.asarray(M, dtype=float)
    limit = min(2 * s, M.shape[1])
    return not spark(M, limit, tol).finite


def generate_dictionary(m: int, p: int, seed: int) -> np.ndarray:
    """IID standard-normal m x p matrix with columns scaled to unit norm."""
    rng = _rng(seed)
    H = rng.standard_normal((m, p))
    H /= np.linalg.norm(H, axis=0)
    return H


def generate_sparse_param(p: int, s: int, seed: int) -> np.ndarray:
    """Vector with a uniformly random size-s support and N(0,1) nonzeros."""
    if s > p:
        raise ValueError("s cannot exceed p")
    rng = _rng(seed)
    support = rng.choice(p, size=s, replace=False)
    alpha = np.zeros(p)
    alpha[support] = rng.standard_normal(s)
    return alpha


def simulate_measurements(H, alpha, sigma: float, seed: int) -> np.ndarray:
    """H @ alpha plus IID N(0, sigma^2) noise; deterministic in the seed."""
    H = np.asarray(H, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if alpha.shape != (H.shape[1],):
        raise ValueError("alpha length must equal the column count of H")
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    y = H @ alpha
    if sigma > 0:
        y = y + sigma * _rng(seed).standard_normal(H.shape[0])
    return y
