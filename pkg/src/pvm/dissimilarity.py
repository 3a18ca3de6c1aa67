"""Building dissimilarity matrices and epsilon grids."""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .data_model import InputError, check_dissimilarity

KERNEL_TOL = 1e-9


def euclidean_matrix(X, Z=None) -> np.ndarray:
    """Euclidean distances between rows of X (n x p) and rows of Z (m x p)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    Z = X if Z is None else np.atleast_2d(np.asarray(Z, dtype=float))
    if X.shape[1] != Z.shape[1]:
        raise InputError(f"dimension mismatch: {X.shape[1]} vs {Z.shape[1]}")
    # explicit differences rather than the |x|^2 + |z|^2 - 2xz expansion, which
    # loses the exact zero diagonal; blocked over rows to bound memory
    out = np.empty((X.shape[0], Z.shape[0]))
    step = max(1, (1 << 22) // max(1, Z.shape[0] * X.shape[1]))
    for start in range(0, X.shape[0], step):
        diff = X[start:start + step, None, :] - Z[None, :, :]
        out[start:start + step] = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    return out


def kernel_to_distance(K, rows: Optional[Sequence[int]] = None,
                       cols: Optional[Sequence[int]] = None,
                       tol: float = KERNEL_TOL) -> np.ndarray:
    """Kernel-induced distance sqrt(K_ii + K_jj - 2 K_ij).

    ``K`` is a Gram matrix over X and Z together; ``rows`` and ``cols`` pick out
    the indices of X and of Z (both default to everything).
    """
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise InputError("kernel matrix must be square")
    if not np.all(np.isfinite(K)):
        raise InputError("kernel matrix contains non-finite values")
    scale = max(1.0, float(np.abs(K).max()))
    if np.abs(K - K.T).max() > tol * scale:
        raise InputError("kernel matrix is not symmetric")
    rows = np.arange(K.shape[0]) if rows is None else np.asarray(rows, dtype=int)
    cols = np.arange(K.shape[0]) if cols is None else np.asarray(cols, dtype=int)
    diag = np.diag(K)
    sq = diag[rows][:, None] + diag[cols][None, :] - 2.0 * K[np.ix_(rows, cols)]
    if sq.min(initial=0.0) < -tol * scale:
        raise InputError("kernel gives a negative squared distance (not PSD)")
    return np.sqrt(np.maximum(sq, 0.0))


def rank_transform(D, D_query=None) -> np.ndarray:
    """Replace d(x, z_j) by the number of training points x_i with d(x_i, z_j) <= d(x, z_j).

    ``D`` is the n x m training-to-candidate matrix.  Without ``D_query`` the
    training rows themselves are transformed; otherwise the q x m query rows are
    ranked against the training column distributions.
    """
    D = check_dissimilarity(D)
    Q = D if D_query is None else check_dissimilarity(D_query)
    if Q.shape[1] != D.shape[1]:
        raise InputError("query matrix must have one column per candidate")
    ranks = np.empty(Q.shape, dtype=float)
    ordered = np.sort(D, axis=0)
    for j in range(D.shape[1]):
        ranks[:, j] = np.searchsorted(ordered[:, j], Q[:, j], side="right")
    return ranks


def positive_entries(D) -> np.ndarray:
    D = np.asarray(D, dtype=float)
    pos = D[D > 0]
    if pos.size == 0:
        raise InputError("all dissimilarities are zero")
    return pos


def distance_quantile(D, q: float) -> float:
    """Linear-interpolation quantile of the positive entries of D."""
    if not 0 <= q <= 1:
        raise InputError("quantile level must be in [0, 1]")
    return float(np.quantile(positive_entries(D), q))


def epsilon_grid(D, count: int = 10, lo_q: float = 0.0, hi_q: float = 0.5) -> np.ndarray:
    """Radii at equally spaced quantile levels of the positive distances.

    The default runs from the minimum to the median distance.  Repeated values
    are collapsed, so the result can be shorter than ``count``.
    """
    if count < 1:
        raise InputError("grid count must be positive")
    if not 0 <= lo_q <= hi_q <= 1:
        raise InputError("need 0 <= lo_q <= hi_q <= 1")
    levels = np.linspace(lo_q, hi_q, count)
    return np.unique(np.quantile(positive_entries(D), levels))
