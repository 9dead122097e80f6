"""Problem instances, Gaussian reward simulation and the benchmark generators."""

from __future__ import annotations

import json
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .design import DUPLICATE_TOL
from .errors import DegenerateInstanceError, IllegalArmError, StructuralError

MAX_RESAMPLES = 100


def make_rng(*keys) -> np.random.Generator:
    """Philox stream keyed by integers and/or strings; identical keys give identical streams."""
    words = []
    for k in keys:
        if isinstance(k, str):
            words.append(zlib.crc32(k.encode()))
        else:
            words.append(int(k) & 0xFFFFFFFF)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(words)))


@dataclass(frozen=True)
class Instance:
    arms: np.ndarray
    items: np.ndarray
    theta_star: np.ndarray
    label: str = ""
    gaps: np.ndarray = field(init=False, repr=False)
    best: int = field(init=False)

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.arms, dtype=float))
        Z = np.atleast_2d(np.asarray(self.items, dtype=float))
        theta = np.asarray(self.theta_star, dtype=float).ravel()
        if Z.size == 0 or X.size == 0:
            raise StructuralError("arms and items must be nonempty")
        d = theta.size
        if X.shape[1] != d or Z.shape[1] != d:
            raise StructuralError("arms, items and theta_star must share a dimension")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Z)) and np.all(np.isfinite(theta))):
            raise StructuralError("non-finite entries")
        if np.linalg.matrix_rank(X) < d:
            raise DegenerateInstanceError("arms do not span R^d")
        for i in range(Z.shape[0]):
            dist = np.linalg.norm(Z[i + 1:] - Z[i], axis=1)
            if np.any(dist <= DUPLICATE_TOL * max(1.0, np.linalg.norm(Z[i]))):
                raise DegenerateInstanceError(f"duplicate item {i}")
        values = Z @ theta
        best = int(np.argmax(values))
        gaps = values[best] - values
        if Z.shape[0] > 1 and np.min(np.delete(gaps, best)) <= 0:
            raise DegenerateInstanceError("best item is not unique")
        for name, val in (("arms", X), ("items", Z), ("theta_star", theta), ("gaps", gaps), ("best", best)):
            object.__setattr__(self, name, val)

    @property
    def d(self) -> int:
        return self.theta_star.size

    @property
    def z_star(self) -> np.ndarray:
        return self.items[self.best]

    @property
    def delta_min(self) -> float:
        return float(np.min(np.delete(self.gaps, self.best))) if len(self.items) > 1 else math.inf

    def gap(self, z) -> float:
        return float((self.z_star - np.asarray(z, dtype=float)) @ self.theta_star)

    def to_dict(self) -> dict:
        return {"label": self.label, "d": self.d, "arms": self.arms.tolist(),
                "items": self.items.tolist(), "theta_star": self.theta_star.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "Instance":
        try:
            inst = cls(data["arms"], data["items"], data["theta_star"], data.get("label", ""))
        except KeyError as e:
            raise StructuralError(f"instance missing field {e}") from None
        if "d" in data and int(data["d"]) != inst.d:
            raise StructuralError("declared d does not match vectors")
        return inst

    def save(self, path) -> None:
        # repr-based float output round-trips exactly
        Path(path).write_text(json.dumps(self.to_dict(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "Instance":
        return cls.from_dict(json.loads(Path(path).read_text()))


class RewardOracle:
    """Noisy rewards ``x^T theta* + N(0, 1)`` drawn from a private seeded stream."""

    def __init__(self, instance: Instance, rng: np.random.Generator | int = 0):
        self.instance = instance
        self.rng = rng if isinstance(rng, np.random.Generator) else make_rng(rng)
        self.pull_count = 0
        self._means = instance.arms @ instance.theta_star

    def arm_index(self, x) -> int:
        x = np.asarray(x, dtype=float)
        hits = np.flatnonzero(np.all(np.isclose(self.instance.arms, x, rtol=0, atol=1e-12), axis=1))
        if hits.size == 0:
            raise IllegalArmError(f"{x.tolist()} is not an arm")
        return int(hits[0])

    def pull(self, x) -> float:
        i = self.arm_index(x)
        self.pull_count += 1
        return float(self._means[i] + self.rng.standard_normal())

    def pull_counts(self, counts) -> np.ndarray:
        """Pull arm ``i`` ``counts[i]`` times; return the per-arm reward sums."""
        counts = np.asarray(counts, dtype=np.int64)
        if counts.shape != self._means.shape or np.any(counts < 0):
            raise StructuralError("counts must be nonnegative, one per arm")
        sums = np.zeros(counts.size)
        for i in np.flatnonzero(counts):
            sums[i] = counts[i] * self._means[i] + self.rng.standard_normal(counts[i]).sum()
        self.pull_count += int(counts.sum())
        return sums


def _unit(angle: float) -> np.ndarray:
    return np.array([math.cos(angle), math.sin(angle)])


def gen_benchmark(d: int, alpha: float = 0.01) -> Instance:
    """Basis vectors plus ``cos(alpha) e1 + sin(alpha) e2``; theta* = 2 e1."""
    if d < 2:
        raise StructuralError("benchmark needs d >= 2")
    X = np.eye(d)
    xp = np.zeros(d)
    xp[:2] = _unit(alpha)
    X = np.vstack([X, xp])
    theta = np.zeros(d)
    theta[0] = 2.0
    return Instance(X, X, theta, f"benchmark(d={d},alpha={alpha})")


def gen_many_arms(n: int, seed: int = 0) -> Instance:
    """Two-dimensional instance with a cloud of ``n - 2`` arms near angle pi/4.

    Cloud offsets are normal with variance 0.09 (std 0.3).
    """
    if n < 3:
        raise StructuralError("many-arms needs n >= 3")
    rng = make_rng(seed, "many_arms")
    fixed = [np.array([1.0, 0.0]), _unit(3 * math.pi / 4)]
    for _ in range(MAX_RESAMPLES):
        phi = rng.normal(0.0, 0.3, size=n - 2)
        X = np.vstack(fixed + [_unit(math.pi / 4 + p) for p in phi])
        try:
            return Instance(X, X, np.array([1.0, 0.0]), f"many_arms(n={n},seed={seed},var=0.09)")
        except DegenerateInstanceError:
            continue
    raise DegenerateInstanceError("could not draw a non-degenerate many-arms instance")


def gen_sphere(d: int = 5, n: int = 10, alpha: float = 0.01, seed: int = 0) -> Instance:
    """``n`` uniform unit vectors; theta* interpolates the closest pair ``x + alpha (x' - x)``."""
    if n < max(2, d):
        raise StructuralError("sphere needs n >= max(2, d) so the arms span R^d")
    rng = make_rng(seed, "sphere")
    for _ in range(MAX_RESAMPLES):
        X = rng.standard_normal((n, d))
        X /= np.linalg.norm(X, axis=1)[:, None]
        G = X @ X.T
        np.fill_diagonal(G, -np.inf)
        # closest pair in Euclidean distance = largest inner product
        i, j = np.unravel_index(int(np.argmax(G)), G.shape)
        np.fill_diagonal(G, 0.0)
        if np.any(G <= -1 + 1e-9):
            continue
        theta = X[i] + alpha * (X[j] - X[i])
        try:
            return Instance(X, X, theta, f"sphere(d={d},n={n},alpha={alpha},seed={seed})")
        except DegenerateInstanceError:
            continue
    raise DegenerateInstanceError("could not draw a non-degenerate sphere instance")


def gen_transductive(d: int) -> Instance:
    """Arms are the basis; items are e_1..e_{d/2} and cos(.1) e_j + sin(.1) e_{j+d/2}."""
    if d < 2 or d % 2:
        raise StructuralError("transductive instance needs an even d >= 2")
    h = d // 2
    X = np.eye(d)
    Z = np.zeros((d, d))
    Z[:h, :h] = np.eye(h)
    for j in range(h):
        Z[h + j, j] = math.cos(0.1)
        Z[h + j, j + h] = math.sin(0.1)
    theta = np.zeros(d)
    theta[0] = 1.0
    return Instance(X, Z, theta, f"transductive(d={d})")


GENERATORS = {
    "benchmark": gen_benchmark,
    "many_arms": gen_many_arms,
    "sphere": gen_sphere,
    "transductive": gen_transductive,
}
