"""Min-max experimental design over a finite arm set, solved by Frank-Wolfe.

The objective for a design ``lam`` on the simplex over the arms is

    f(lam) = max_y  y^T A(lam)^+ y / omega_y,     A(lam) = sum_x lam_x x x^T

Unit divisors give the all-pairs / G-optimal style value; squared gaps as
divisors give the gap-weighted oracle objective.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateInstanceError, InfeasibleDesignError, StructuralError
from .linalg import design_matrix, inv_norms_sq

log = logging.getLogger(__name__)

DUPLICATE_TOL = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    max_iters: int = 1000
    rel_tol: float = 0.01
    threshold: float = 1e-5


@dataclass(frozen=True)
class Design:
    weights: np.ndarray
    value: float
    iterations: int

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.weights > 0)

    def to_dict(self) -> dict:
        return {"weights": self.weights.tolist(), "value": self.value,
                "iterations": self.iterations}


@dataclass(frozen=True)
class DirectionSet:
    directions: np.ndarray
    divisors: np.ndarray = field(default=None)

    def __post_init__(self):
        Y = np.atleast_2d(np.asarray(self.directions, dtype=float))
        if Y.shape[0] == 0 or Y.size == 0:
            raise StructuralError("direction set is empty")
        if np.any(np.linalg.norm(Y, axis=1) == 0):
            raise DegenerateInstanceError("direction set contains a zero vector")
        w = np.ones(Y.shape[0]) if self.divisors is None else np.asarray(self.divisors, dtype=float)
        if w.shape != (Y.shape[0],) or np.any(w <= 0):
            raise StructuralError("divisors must be positive, one per direction")
        object.__setattr__(self, "directions", Y)
        object.__setattr__(self, "divisors", w)

    def __len__(self) -> int:
        return self.directions.shape[0]


def _check_distinct(S: np.ndarray) -> None:
    for i, j in itertools.combinations(range(S.shape[0]), 2):
        if np.linalg.norm(S[i] - S[j]) <= DUPLICATE_TOL * max(1.0, np.linalg.norm(S[i])):
            raise DegenerateInstanceError(f"vectors {i} and {j} coincide")


def directions(S) -> DirectionSet:
    """Unordered pairwise differences ``S[i] - S[j]`` for ``i < j``."""
    S = np.atleast_2d(np.asarray(S, dtype=float))
    if S.shape[0] < 2:
        raise StructuralError("need at least two vectors to form directions")
    _check_distinct(S)
    i, j = np.triu_indices(S.shape[0], k=1)
    return DirectionSet(S[i] - S[j])


def star_directions(z_star, S, theta_star) -> DirectionSet:
    """Directions ``z_star - z`` over ``z in S`` (other than ``z_star``), divided by squared gaps."""
    z_star = np.asarray(z_star, dtype=float)
    S = np.atleast_2d(np.asarray(S, dtype=float))
    theta = np.asarray(theta_star, dtype=float)
    diffs = z_star[None, :] - S
    is_star = np.linalg.norm(diffs, axis=1) <= DUPLICATE_TOL * max(1.0, np.linalg.norm(z_star))
    if not is_star.any():
        raise StructuralError("z_star is not a member of S")
    Y = diffs[~is_star]
    if Y.shape[0] == 0:
        raise StructuralError("S has no item besides z_star")
    gaps = Y @ theta
    if np.any(gaps <= 0):
        raise DegenerateInstanceError("z_star is not the unique maximizer over S")
    return DirectionSet(Y, gaps ** 2)


def design_value(arms, dirset: DirectionSet, weights) -> float:
    """``max_y |y|^2_{A(w)^+} / omega_y``; ``inf`` if any direction is outside range."""
    A = design_matrix(arms, weights)
    return float(np.max(inv_norms_sq(dirset.directions, A) / dirset.divisors))


def min_max_design(arms, dirset: DirectionSet, config: SolverConfig | None = None) -> Design:
    """Frank-Wolfe with step ``2/(k+2)`` from the uniform design.

    Each iteration linearizes at the currently worst direction ``y*`` and moves
    mass toward the arm maximizing ``(y*^T A^-1 x)^2``. Stops on a relative
    l2 change below ``config.rel_tol`` or after ``config.max_iters``; weights
    under ``config.threshold`` are then zeroed and the rest renormalized.
    """
    config = config or SolverConfig()
    X = np.atleast_2d(np.asarray(arms, dtype=float))
    Y, omega = dirset.directions, dirset.divisors
    if X.shape[1] != Y.shape[1]:
        raise StructuralError("arms and directions differ in dimension")
    n = X.shape[0]
    lam = np.full(n, 1.0 / n)

    vals = inv_norms_sq(Y, design_matrix(X, lam)) / omega
    if not np.all(np.isfinite(vals)):
        raise InfeasibleDesignError("some direction is outside span(arms)")

    it = 0
    # k starts at 1: a unit first step would discard the uniform initializer
    for k in range(1, config.max_iters + 1):
        it = k
        A = design_matrix(X, lam)
        Ainv = np.linalg.inv(A)
        M = Y @ Ainv
        vals = np.einsum("ij,ij->i", M, Y) / omega
        j = int(np.argmax(vals))
        g = (X @ M[j]) ** 2
        i = int(np.argmax(g))
        gamma = 2.0 / (k + 2)
        new = (1 - gamma) * lam
        new[i] += gamma
        change = np.linalg.norm(new - lam) / np.linalg.norm(lam)
        lam = new
        if change < config.rel_tol:
            break

    lam_t = np.where(lam < config.threshold, 0.0, lam)
    lam_t /= lam_t.sum()
    value = design_value(X, dirset, lam_t)
    if not np.isfinite(value):
        log.warning("thresholding made the design infeasible; keeping raw weights")
        lam_t = lam / lam.sum()
        value = design_value(X, dirset, lam_t)
    return Design(lam_t, value, it)
