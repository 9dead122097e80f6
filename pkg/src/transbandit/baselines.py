"""Non-adaptive comparators: static XY-allocation and the theta*-aware oracle allocation.

Both fix one design up front and then grow a cumulative budget geometrically,
``B_t = ceil(B_1 v^(t-1))`` with ``B_1 = max(ceil(v), r(eps))``. All samples
are pooled; after each phase the stopping test accepts the empirical leader
``zh`` once, for every other item ``z``,

    (zh - z)^T theta_hat >= sqrt(2 |zh - z|^2_{A^-1} log(|Z|^2 t^2 / delta)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .design import Design, SolverConfig, directions, min_max_design, star_directions
from .env import RewardOracle
from .errors import NonterminatingError, StructuralError
from .linalg import SampleBatch, design_matrix, inv_norms_sq, least_squares
from .rounding import apportion, min_samples

MAX_PHASES = 5000


@dataclass
class StaticRunResult:
    recommended: int
    total_samples: int
    phases_evaluated: int
    correct: bool | None = None
    design: Design | None = None

    def to_dict(self) -> dict:
        return {"recommended": self.recommended, "total_samples": self.total_samples,
                "phases_evaluated": self.phases_evaluated, "correct": self.correct,
                "design": self.design.to_dict() if self.design else None}


def stopping_test(theta_hat, items, A, delta: float, t: int) -> int | None:
    """Index of the certified best item, or None if no item passes yet."""
    Z = np.asarray(items, dtype=float)
    values = Z @ theta_hat
    lead = int(np.argmax(values))
    others = np.delete(np.arange(Z.shape[0]), lead)
    if others.size == 0:
        return lead
    Y = Z[lead] - Z[others]
    level = math.log(Z.shape[0] ** 2 * t ** 2 / delta)
    widths = np.sqrt(2 * inv_norms_sq(Y, A) * level)
    return lead if np.all(values[lead] - values[others] >= widths) else None


def static_run(arms, items, design: Design, delta: float, v: float, oracle: RewardOracle,
               eps: float = 0.2, max_phases: int = MAX_PHASES) -> StaticRunResult:
    """Run the doubling protocol for a fixed ``design``."""
    X = np.atleast_2d(np.asarray(arms, dtype=float))
    Z = np.atleast_2d(np.asarray(items, dtype=float))
    if not 1 < v < 2:
        raise StructuralError("v must lie in (1, 2)")
    if not 0 < delta < 1:
        raise StructuralError("delta must lie in (0, 1)")
    if Z.shape[0] == 1:
        return StaticRunResult(0, 0, 0, design=design)

    b1 = max(math.ceil(v), min_samples(X.shape[1], eps), design.support.size)
    counts = np.zeros(X.shape[0], dtype=np.int64)
    sums = np.zeros(X.shape[0])
    budget = 0
    for t in range(1, max_phases + 1):
        budget = max(budget + 1, math.ceil(b1 * v ** (t - 1)))
        target = apportion(design, budget).counts
        # apportionment is not monotone in the budget; never take pulls back
        new = np.maximum(target - counts, 0)
        sums += oracle.pull_counts(new)
        counts += new
        theta_hat = least_squares(SampleBatch(X, counts, sums))
        winner = stopping_test(theta_hat, Z, design_matrix(X, counts), delta, t)
        if winner is not None:
            return StaticRunResult(winner, int(counts.sum()), t, design=design)
    raise NonterminatingError(f"stopping test never passed in {max_phases} phases")


def xy_static_run(arms, items, delta: float, v: float, oracle: RewardOracle, eps: float = 0.2,
                  solver: SolverConfig | None = None) -> StaticRunResult:
    """Static allocation on all pairwise item differences."""
    Z = np.atleast_2d(np.asarray(items, dtype=float))
    if Z.shape[0] == 1:
        return StaticRunResult(0, 0, 0)
    design = min_max_design(arms, directions(Z), solver)
    return static_run(arms, Z, design, delta, v, oracle, eps)


def xy_oracle_run(arms, items, theta_star, delta: float, v: float, oracle: RewardOracle,
                  eps: float = 0.2, solver: SolverConfig | None = None) -> StaticRunResult:
    """Static allocation on ``z* - z`` weighted by inverse squared gaps (needs theta*)."""
    Z = np.atleast_2d(np.asarray(items, dtype=float))
    if Z.shape[0] == 1:
        return StaticRunResult(0, 0, 0)
    theta = np.asarray(theta_star, dtype=float)
    z_star = Z[int(np.argmax(Z @ theta))]
    design = min_max_design(arms, star_directions(z_star, Z, theta), solver)
    return static_run(arms, Z, design, delta, v, oracle, eps)
