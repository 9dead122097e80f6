"""Small dense linear algebra: design matrices, inverse norms, least squares."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import StructuralError

# relative eigenvalue cutoff for the pseudoinverse
EIG_RCOND = 1e-12
# a direction is outside range(A) when its residual exceeds this fraction of its norm
RANGE_TOL = 1e-8


def _as_matrix(arms) -> np.ndarray:
    X = np.atleast_2d(np.asarray(arms, dtype=float))
    if X.ndim != 2 or X.shape[0] == 0:
        raise StructuralError("arms must be a nonempty list of equal-length vectors")
    return X


def design_matrix(arms, weights) -> np.ndarray:
    """Return ``sum_i weights[i] * outer(arms[i], arms[i])``, symmetrized."""
    X = _as_matrix(arms)
    w = np.asarray(weights, dtype=float).ravel()
    if w.shape[0] != X.shape[0]:
        raise StructuralError(
            f"got {w.shape[0]} weights for {X.shape[0]} arms")
    if np.any(w < 0):
        raise StructuralError("weights must be nonnegative")
    A = (X * w[:, None]).T @ X
    return 0.5 * (A + A.T)


def _pinv_parts(A: np.ndarray):
    """Eigen-split A into its (range basis, inverse eigenvalues, null basis)."""
    A = 0.5 * (A + A.T)
    w, V = np.linalg.eigh(A)
    scale = max(np.abs(w).max(initial=0.0), np.finfo(float).tiny)
    keep = w > EIG_RCOND * scale
    return V[:, keep], 1.0 / w[keep], V[:, ~keep]


def inv_norms_sq(Y, A) -> np.ndarray:
    """Row-wise ``y^T A^+ y`` for every row of ``Y``.

    Rows that are not in the range of ``A`` (residual above ``RANGE_TOL * |y|``)
    get ``inf``.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    A = np.asarray(A, dtype=float)
    if A.shape != (Y.shape[1], Y.shape[1]):
        raise StructuralError(f"matrix shape {A.shape} does not match dimension {Y.shape[1]}")
    V, inv_w, N = _pinv_parts(A)
    P = Y @ V
    out = (P * P) @ inv_w
    if N.shape[1]:
        resid = np.linalg.norm(Y @ N, axis=1)
        out = np.where(resid > RANGE_TOL * np.linalg.norm(Y, axis=1), np.inf, out)
    return out


def inv_norm_sq(y, A) -> float:
    """``y^T A^+ y``, or ``inf`` when ``y`` is outside the range of ``A``."""
    return float(inv_norms_sq(np.asarray(y, dtype=float)[None, :], A)[0])


def pinv_solve(A, b) -> np.ndarray:
    V, inv_w, _ = _pinv_parts(np.asarray(A, dtype=float))
    return V @ (inv_w * (V.T @ np.asarray(b, dtype=float)))


@dataclass(frozen=True)
class SampleBatch:
    """Pulls summarized by arm: how often each arm was pulled and its reward sum.

    This is a sufficient statistic for ordinary least squares, so large
    batches never need to be materialized pull by pull.
    """

    arms: np.ndarray
    counts: np.ndarray
    reward_sums: np.ndarray

    @classmethod
    def from_pulls(cls, pulls) -> "SampleBatch":
        """Build from an iterable of ``(arm_vector, reward)`` pairs."""
        pulls = list(pulls)
        if not pulls:
            raise StructuralError("empty batch")
        index: dict[tuple, int] = {}
        arms, counts, sums = [], [], []
        for x, r in pulls:
            key = tuple(np.asarray(x, dtype=float).tolist())
            if key not in index:
                index[key] = len(arms)
                arms.append(key)
                counts.append(0)
                sums.append(0.0)
            i = index[key]
            counts[i] += 1
            sums[i] += float(r)
        return cls(np.array(arms, dtype=float), np.array(counts), np.array(sums))

    @property
    def size(self) -> int:
        return int(self.counts.sum())


def least_squares(batch: SampleBatch) -> np.ndarray:
    """OLS estimate ``A^+ b`` with ``A = sum x x^T`` and ``b = sum x r``."""
    if batch.size == 0:
        raise StructuralError("empty batch")
    X = _as_matrix(batch.arms)
    A = design_matrix(X, batch.counts)
    b = X.T @ np.asarray(batch.reward_sums, dtype=float)
    return pinv_solve(A, b)
