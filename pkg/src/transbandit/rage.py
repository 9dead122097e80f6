"""Randomized Adaptive Gap Elimination (RAGE).

Rounds ``t = 1, 2, ...`` each solve the all-pairs design over the surviving
items, pull a rounded allocation of ``N_t`` samples, fit least squares on that
round's samples only, and discard every item that some survivor beats by at
least ``2^-(t+2)`` on the fitted parameter.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .design import Design, SolverConfig, directions, min_max_design
from .env import RewardOracle
from .errors import NonterminatingError, StructuralError
from .linalg import SampleBatch, design_matrix, inv_norms_sq, least_squares
from .rounding import Allocation, apportion, min_samples

log = logging.getLogger(__name__)

EXTRA_PHASES = 20
HARD_PHASE_CAP = 200


@dataclass
class PhaseRecord:
    t: int
    delta_t: float
    design: Design
    rho_t: float
    N_t: int
    allocation: Allocation
    theta_hat: np.ndarray
    active_before: list[int]
    active_after: list[int]
    # max over directions of |y|^2_{A_t^-1} / ((1 + eps) rho_t / N_t); <= 1 when rounding is efficient
    width_ratio: float = math.nan

    def to_dict(self) -> dict:
        return {
            "t": self.t, "delta_t": self.delta_t, "design": self.design.to_dict(),
            "rho_t": self.rho_t, "N_t": self.N_t, "allocation": self.allocation.to_dict(),
            "theta_hat": self.theta_hat.tolist(), "active_before": self.active_before,
            "active_after": self.active_after, "width_ratio": self.width_ratio,
        }


@dataclass
class RunResult:
    recommended: int
    total_samples: int
    phases: list[PhaseRecord] = field(default_factory=list)
    correct: bool | None = None

    def to_dict(self) -> dict:
        return {"recommended": self.recommended, "total_samples": self.total_samples,
                "correct": self.correct, "phases": [p.to_dict() for p in self.phases]}


def round_budget(t: int, rho: float, eps: float, n_items: int, delta_t: float, r_eps: int) -> int:
    """``max(ceil(8 (2^(t+1))^2 rho (1+eps) log(|Z|^2 / delta_t)), r(eps))`` with natural log."""
    raw = 8 * (2.0 ** (t + 1)) ** 2 * rho * (1 + eps) * math.log(n_items ** 2 / delta_t)
    return max(math.ceil(raw), r_eps)


def eliminate(theta_hat, active, items, t: int) -> list[int]:
    """Drop every active item some other active item beats by at least ``2^-(t+2)``."""
    active = list(active)
    if not active:
        raise StructuralError("active set is empty")
    values = np.asarray(items, dtype=float)[active] @ np.asarray(theta_hat, dtype=float)
    # max over z' of (z' - z)^T theta_hat is attained at the empirical leader
    beaten = values.max() - values >= 2.0 ** -(t + 2)
    return [a for a, b in zip(active, beaten) if not b]


def rage_run(arms, items, delta: float, oracle: RewardOracle, eps: float = 0.2,
             solver: SolverConfig | None = None) -> RunResult:
    X = np.atleast_2d(np.asarray(arms, dtype=float))
    Z = np.atleast_2d(np.asarray(items, dtype=float))
    if Z.size == 0:
        raise StructuralError("no items")
    if not 0 < delta < 1 or eps <= 0:
        raise StructuralError("need 0 < delta < 1 and eps > 0")
    solver = solver or SolverConfig()
    d = X.shape[1]
    r_eps = min_samples(d, eps)

    active = list(range(Z.shape[0]))
    phases: list[PhaseRecord] = []
    total = 0
    t = 1
    while len(active) > 1:
        delta_t = delta / t ** 2
        dirs = directions(Z[active])
        design = min_max_design(X, dirs, solver)
        rho = design.value
        N = round_budget(t, rho, eps, Z.shape[0], delta_t, r_eps)
        # FW designs need not be sparse; the rounding needs one pull per support arm
        N = max(N, design.support.size)
        alloc = apportion(design, N)

        sums = oracle.pull_counts(alloc.counts)
        batch = SampleBatch(X, alloc.counts, sums)
        theta_hat = least_squares(batch)
        total += N

        widths = inv_norms_sq(dirs.directions, design_matrix(X, alloc.counts))
        ratio = float(widths.max() / ((1 + eps) * rho / N))
        if ratio > 1 + 1e-9:
            log.warning("round %d: rounded design misses the (1+eps) width by factor %.4f", t, ratio)

        survivors = eliminate(theta_hat, active, Z, t)
        phases.append(PhaseRecord(t, delta_t, design, rho, N, alloc, theta_hat,
                                  active, survivors, ratio))
        log.debug("round %d: rho=%.4g N=%d active %d -> %d", t, rho, N, len(active), len(survivors))
        active = survivors

        if len(active) > 1:
            vals = Z[active] @ theta_hat
            emp_gaps = vals.max() - vals
            pos = emp_gaps[emp_gaps > 0]
            cap = math.ceil(math.log2(1 / pos.min())) + EXTRA_PHASES if pos.size else HARD_PHASE_CAP
            if t >= min(cap, HARD_PHASE_CAP):
                raise NonterminatingError(f"no termination after {t} rounds")
        t += 1

    return RunResult(active[0], total, phases)
