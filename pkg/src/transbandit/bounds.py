"""Instance-level diagnostics: the gap-weighted design value, lower and upper
sample-complexity bounds, and gauge-based bounds on the all-pairs value."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .design import Design, DirectionSet, SolverConfig, directions, min_max_design, star_directions
from .env import Instance
from .errors import InfeasibleDesignError, StructuralError
from .rounding import min_samples


@dataclass
class InstanceDiagnostics:
    psi_star: float
    lambda_star: Design
    lower_bound: float
    theorem2_bound: int
    gaps: np.ndarray
    delta_min: float

    def to_dict(self) -> dict:
        return {"psi_star": self.psi_star, "lambda_star": self.lambda_star.to_dict(),
                "lower_bound": self.lower_bound, "theorem2_bound": self.theorem2_bound,
                "gaps": self.gaps.tolist(), "delta_min": self.delta_min}


def rho(arms, dirset, solver: SolverConfig | None = None) -> float:
    """Unweighted min-max value of ``dirset`` (divisors ignored)."""
    if not isinstance(dirset, DirectionSet):
        dirset = DirectionSet(dirset)
    return min_max_design(arms, DirectionSet(dirset.directions), solver).value


def psi_star(instance: Instance, solver: SolverConfig | None = None) -> tuple[Design, float]:
    """Optimal gap-weighted design and its value over ``z* - z``."""
    dirs = star_directions(instance.z_star, instance.items, instance.theta_star)
    design = min_max_design(instance.arms, dirs, solver)
    return design, design.value


def lower_bound(instance: Instance, delta: float, solver: SolverConfig | None = None,
                psi: float | None = None) -> float:
    """``log(1 / (2.4 delta)) * psi*``: expected samples any delta-PAC method needs."""
    if not 0 < delta < 1:
        raise StructuralError("delta must lie in (0, 1)")
    if psi is None:
        psi = psi_star(instance, solver)[1]
    return math.log(1 / (2.4 * delta)) * psi


def gap_levels(delta_min: float) -> int:
    """Number of halving levels, ``floor(log2(1/delta_min))`` but at least one."""
    return max(1, math.floor(math.log2(1 / delta_min)))


def theorem2_bound(instance: Instance, delta: float, eps: float,
                   solver: SolverConfig | None = None) -> int:
    """Worst-case RAGE sample count computed from the true gaps.

    Sums, over levels ``t``, ``max(8 ceil((2^(t+1))^2 rho(Y(S_t)) (1+eps)
    log(t^2 |Z|^2 / delta)), r(eps))`` where ``S_t`` holds the items with gap
    at most ``2^-t``. Round one always designs over every item, so the
    first level uses ``S_1 = Z``; with the gap rule alone, items with gap
    above 1/2 would drop out of the first term even though they are paid for.
    """
    Z = instance.items
    if len(Z) == 1:
        return 0
    r_eps = min_samples(instance.d, eps)
    cache: dict[tuple, float] = {}
    total = 0
    for t in range(1, gap_levels(instance.delta_min) + 1):
        S = tuple(range(len(Z))) if t == 1 else tuple(np.flatnonzero(instance.gaps <= 2.0 ** -t))
        if S not in cache:
            cache[S] = 0.0 if len(S) < 2 else rho(instance.arms, directions(Z[list(S)]), solver)
        inner = (2.0 ** (t + 1)) ** 2 * cache[S] * (1 + eps) * math.log(t ** 2 * len(Z) ** 2 / delta)
        total += max(8 * math.ceil(inner), r_eps)
    return total


def gauge(arms, y) -> float:
    """Largest ``c`` with ``c y`` in conv(X u -X), via the minimal conic combination LP."""
    X = np.atleast_2d(np.asarray(arms, dtype=float))
    y = np.asarray(y, dtype=float)
    if not np.any(y):
        raise StructuralError("gauge of the zero vector")
    V = np.vstack([X, -X])
    res = linprog(np.ones(V.shape[0]), A_eq=V.T, b_eq=y, bounds=(0, None), method="highs")
    if res.status == 2:
        raise InfeasibleDesignError("y is outside span(arms)")
    if res.status != 0:
        raise RuntimeError(f"gauge LP failed: {res.message}")
    return 1.0 / res.fun


def gauge_set(arms, Y) -> float:
    return min(gauge(arms, y) for y in np.atleast_2d(Y))


def lemma3_bounds(arms, Y) -> tuple[float, float]:
    """(lower, upper) sandwich for the all-pairs value of ``Y``.

    lower = max |y|_2^2 / max |x|_2, upper = d / gauge(Y)^2, with the
    upper bound sharpened to ``1 / gauge(y)^2`` for a single direction.
    """
    X = np.atleast_2d(np.asarray(arms, dtype=float))
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    lower = float(np.max(np.sum(Y ** 2, axis=1)) / np.max(np.linalg.norm(X, axis=1)))
    g = gauge_set(X, Y)
    upper = (1.0 if len(Y) == 1 else X.shape[1]) / g ** 2
    return lower, upper


def diagnose(instance: Instance, delta: float, eps: float,
             solver: SolverConfig | None = None) -> InstanceDiagnostics:
    design, psi = psi_star(instance, solver)
    return InstanceDiagnostics(
        psi_star=psi, lambda_star=design,
        lower_bound=lower_bound(instance, delta, psi=psi),
        theorem2_bound=theorem2_bound(instance, delta, eps, solver),
        gaps=instance.gaps.copy(), delta_min=instance.delta_min)
