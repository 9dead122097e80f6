"""Efficient apportionment of a continuous design into integer pull counts."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetTooSmallError, StructuralError


@dataclass(frozen=True)
class Allocation:
    counts: np.ndarray
    total: int

    def to_dict(self) -> dict:
        return {"counts": self.counts.tolist(), "total": self.total}


def min_samples(d: int, eps: float) -> int:
    """Smallest budget ``ceil((d(d+1)/2 + 1) / eps)`` for a (1+eps)-efficient rounding."""
    if not 0 < eps:
        raise StructuralError("eps must be positive")
    # round away float noise such as 4/0.2 = 20.000000000000004
    return math.ceil(round((d * (d + 1) / 2 + 1) / eps, 9))


def apportion(design, N: int) -> Allocation:
    """Round ``design`` (a Design or a weight vector) to integer counts summing to ``N``.

    Phase one sets ``ceil((N - p/2) * lam_i)`` on the support of size ``p``.
    Phase two fixes the discrepancy one unit at a time: while short, increment
    an arm with the smallest ``n_i / lam_i``; while over, decrement an arm with
    the largest ``(n_i - 1) / lam_i``. Ties go to the lowest index.
    """
    lam = np.asarray(getattr(design, "weights", design), dtype=float)
    N = int(N)
    support = np.flatnonzero(lam > 0)
    p = support.size
    if p == 0:
        raise StructuralError("design has empty support")
    if N < p:
        raise BudgetTooSmallError(f"budget {N} below support size {p}")
    w = lam[support] / lam[support].sum()
    n = np.ceil((N - 0.5 * p) * w).astype(np.int64)

    for _ in range(p + 1):
        gap = int(n.sum()) - N
        if gap == 0:
            break
        if gap < 0:
            n[int(np.argmin(n / w))] += 1
        else:
            n[int(np.argmax((n - 1) / w))] -= 1
    else:
        raise AssertionError(f"apportionment did not settle within {p} adjustments")

    counts = np.zeros(lam.size, dtype=np.int64)
    counts[support] = n
    return Allocation(counts, N)
