"""Rank statistics feeding the copula fit.

Pseudo-observations via midranks, pairwise Kendall's tau (tau-b), the
aggregated tau matrix, and the eigenvalue-clipping nearest-correlation
projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

from .numerics import RngStream

__all__ = [
    "TauMatrix",
    "CorrelationMatrix",
    "pseudo_observations",
    "kendall_tau",
    "tau_matrix",
    "nearest_correlation",
]


@dataclass(frozen=True)
class TauMatrix:
    tau: np.ndarray          # d x d, symmetric, unit diagonal
    bar_tau: float           # mean over the strict upper triangle
    subsampled: bool


@dataclass(frozen=True)
class CorrelationMatrix:
    R: np.ndarray
    min_eigenvalue: float


def pseudo_observations(features: np.ndarray) -> np.ndarray:
    """Map each column to (0,1) via midrank/(m+1).

    Ties get average ranks, so a constant column maps to 0.5 throughout.
    Invariant under strictly increasing per-column transforms.
    """
    X = np.asarray(features, dtype=float)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError("pseudo_observations expects a matrix with m >= 2 rows")
    m = X.shape[0]
    ranks = np.apply_along_axis(stats.rankdata, 0, X)  # midranks
    return ranks / (m + 1.0)


def kendall_tau(x, y) -> float:
    """Kendall's tau-b between two equal-length vectors.

    Returns 0 when either vector is constant (independence convention for
    degenerate features).
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("kendall_tau expects two equal-length vectors")
    if x.size < 2:
        raise ValueError("kendall_tau needs at least two observations")
    if np.all(x == x[0]) or np.all(y == y[0]):
        return 0.0
    tau = stats.kendalltau(x, y).statistic
    return float(tau)


def tau_matrix(U: np.ndarray, m_cap: int = 2000, rng: RngStream | None = None) -> TauMatrix:
    """Pairwise Kendall tau over all column pairs of U.

    Rows are subsampled (seeded, without replacement) down to ``m_cap``
    when m exceeds it, to bound the quadratic pairwise cost.
    """
    U = np.asarray(U, dtype=float)
    m, d = U.shape
    if m_cap < 50:
        raise ValueError("m_cap must be at least 50")
    if not np.all(np.isfinite(U)):
        raise ValueError("tau_matrix requires finite entries")

    subsampled = m > m_cap
    if subsampled:
        if rng is None:
            raise ValueError("row subsampling requires an RngStream")
        keep = rng.permutation(m)[:m_cap]
        U = U[np.sort(keep)]

    tau = np.eye(d)
    for i in range(d):
        for j in range(i + 1, d):
            tau[i, j] = tau[j, i] = kendall_tau(U[:, i], U[:, j])
    if d > 1:
        bar = float(np.mean(tau[np.triu_indices(d, k=1)]))
    else:
        bar = 0.0
    return TauMatrix(tau=tau, bar_tau=bar, subsampled=subsampled)


def nearest_correlation(S: np.ndarray, floor: float = 1e-8) -> CorrelationMatrix:
    """Repair a pseudo-correlation matrix by eigenvalue clipping.

    Symmetrize, clip eigenvalues below ``floor`` up to it, reconstruct and
    rescale back to unit diagonal. Idempotent on already-valid inputs.
    """
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("nearest_correlation expects a square matrix")
    if not np.all(np.isfinite(S)):
        raise ValueError("nearest_correlation requires finite entries")
    A = 0.5 * (S + S.T)

    vals, vecs = np.linalg.eigh(A)
    if np.min(vals) >= floor:
        R = A
    else:
        clipped = np.maximum(vals, floor)
        R = (vecs * clipped) @ vecs.T
        scale = 1.0 / np.sqrt(np.diag(R))
        R = R * scale[:, None] * scale[None, :]
        R = 0.5 * (R + R.T)
    np.fill_diagonal(R, 1.0)
    min_eig = float(np.min(np.linalg.eigvalsh(R)))
    return CorrelationMatrix(R=R, min_eigenvalue=min_eig)
