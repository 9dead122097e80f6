"""Seeded Monte-Carlo sweeps over instance generators, written as CSV."""

from __future__ import annotations

import csv
import inspect
import io
import json
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .baselines import xy_oracle_run, xy_static_run
from .bounds import lower_bound, psi_star, theorem2_bound
from .design import SolverConfig
from .env import GENERATORS, Instance, RewardOracle, make_rng
from .rage import rage_run

ALGORITHMS = ("rage", "xy_static", "xy_oracle")
CSV_FIELDS = ["algorithm", "generator", "sweep_value", "trial", "seed", "samples", "correct",
              "wall_ms", "psi_star", "lower_bound", "theorem2_bound"]
# generators whose instance depends on a seed
SEEDED = {"many_arms", "sphere"}


class ConfigError(ValueError):
    pass


@dataclass
class ExperimentConfig:
    generator: str
    params: dict = field(default_factory=dict)
    algorithms: list = field(default_factory=lambda: list(ALGORITHMS))
    delta: float = 0.05
    eps: float = 0.2
    trials: int = 20
    base_seed: int = 0
    sweep_param: str | None = None
    sweep_values: list = field(default_factory=lambda: [None])
    v: float = 1.1
    solver: SolverConfig = field(default_factory=SolverConfig)
    record_timing: bool = False

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            gen = data["generator"]
            name = gen["name"] if isinstance(gen, dict) else gen
            params = dict(gen.get("params", {})) if isinstance(gen, dict) else {}
            sweep = data.get("sweep") or {}
            cfg = cls(
                generator=name, params=params,
                algorithms=list(data.get("algorithms", ALGORITHMS)),
                delta=float(data.get("delta", 0.05)), eps=float(data.get("eps", 0.2)),
                trials=int(data.get("trials", 20)), base_seed=int(data.get("base_seed", 0)),
                sweep_param=sweep.get("param"), sweep_values=list(sweep.get("values", [None])),
                v=float(data.get("v", 1.1)), solver=SolverConfig(**data.get("solver", {})),
                record_timing=bool(data.get("record_timing", False)),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"bad experiment config: {e}") from None
        cfg.validate()
        return cfg

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as e:
            raise ConfigError(f"malformed config JSON: {e}") from None
        return cls.from_dict(data)

    def validate(self) -> None:
        if self.generator not in GENERATORS:
            raise ConfigError(f"unknown generator {self.generator!r}")
        bad = [a for a in self.algorithms if a not in ALGORITHMS]
        if bad or not self.algorithms:
            raise ConfigError(f"unknown algorithms {bad}")
        if self.trials < 1:
            raise ConfigError("trials must be >= 1")
        if not 0 < self.delta < 1:
            raise ConfigError("delta must lie in (0, 1)")
        if self.eps <= 0 or not 1 < self.v < 2:
            raise ConfigError("need eps > 0 and 1 < v < 2")
        accepted = set(inspect.signature(GENERATORS[self.generator]).parameters) - {"seed"}
        names = set(self.params) | ({self.sweep_param} if self.sweep_param else set())
        if names - accepted:
            raise ConfigError(f"{self.generator} does not take {sorted(names - accepted)}")
        # build every instance once up front so bad sweep values fail before any trial
        for value in self.sweep_values:
            try:
                self.instance(value, 0)
            except ValueError as e:
                raise ConfigError(f"sweep value {value!r}: {e}") from None

    def instance(self, sweep_value, trial: int) -> Instance:
        kwargs = dict(self.params)
        if self.sweep_param is not None:
            kwargs[self.sweep_param] = sweep_value
        if self.generator in SEEDED:
            kwargs["seed"] = int(make_rng(self.base_seed, "instance", str(sweep_value), trial)
                                 .integers(2 ** 31))
        return GENERATORS[self.generator](**kwargs)


def trial_seed(base_seed: int, algorithm: str, sweep_value, trial: int) -> int:
    return int(make_rng(base_seed, algorithm, str(sweep_value), trial).integers(2 ** 31))


def run_algorithm(name: str, inst: Instance, oracle: RewardOracle, delta: float, eps: float,
                  v: float, solver: SolverConfig):
    if name == "rage":
        return rage_run(inst.arms, inst.items, delta, oracle, eps, solver)
    if name == "xy_static":
        return xy_static_run(inst.arms, inst.items, delta, v, oracle, eps, solver)
    if name == "xy_oracle":
        return xy_oracle_run(inst.arms, inst.items, inst.theta_star, delta, v, oracle, eps, solver)
    raise ValueError(f"unknown algorithm {name!r}")


def _diagnostics(cfg: ExperimentConfig, inst: Instance) -> dict:
    if len(inst.items) < 2:
        return {"psi_star": 0.0, "lower_bound": 0.0, "theorem2_bound": 0}
    psi = psi_star(inst, cfg.solver)[1]
    return {"psi_star": psi, "lower_bound": lower_bound(inst, cfg.delta, psi=psi),
            "theorem2_bound": theorem2_bound(inst, cfg.delta, cfg.eps, cfg.solver)}


def _cell(cfg: ExperimentConfig, sweep_value, trial: int) -> list[dict]:
    """All algorithms on one (sweep value, trial) instance."""
    inst = cfg.instance(sweep_value, trial)
    diag = _diagnostics(cfg, inst)
    rows = []
    for alg in cfg.algorithms:
        seed = trial_seed(cfg.base_seed, alg, sweep_value, trial)
        oracle = RewardOracle(inst, make_rng(seed))
        t0 = time.perf_counter()
        res = run_algorithm(alg, inst, oracle, cfg.delta, cfg.eps, cfg.v, cfg.solver)
        wall = round((time.perf_counter() - t0) * 1000)
        rows.append({
            "algorithm": alg, "generator": cfg.generator, "sweep_value": sweep_value,
            "trial": trial, "seed": seed, "samples": res.total_samples,
            "correct": res.recommended == inst.best,
            "wall_ms": wall if cfg.record_timing else None, **diag,
        })
    return rows


def _cell_args(args):
    return _cell(*args)


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> list[dict]:
    jobs = [(cfg, sv, tr) for sv in cfg.sweep_values for tr in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            chunks = list(pool.map(_cell_args, jobs))
    else:
        chunks = [_cell(*job) for job in jobs]
    rows = [r for chunk in chunks for r in chunk]
    order = {a: i for i, a in enumerate(ALGORITHMS)}
    sweep_pos = {repr(v): i for i, v in enumerate(cfg.sweep_values)}
    rows.sort(key=lambda r: (order[r["algorithm"]], sweep_pos[repr(r["sweep_value"])], r["trial"]))
    return rows


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in rows:
        writer.writerow([_fmt(r[k]) for k in CSV_FIELDS])
    return buf.getvalue()


def summarize(rows: list[dict]) -> list[dict]:
    """Per (algorithm, sweep value): mean samples, standard error, failures."""
    cells: dict[tuple, list[dict]] = {}
    for r in rows:
        cells.setdefault((r["algorithm"], repr(r["sweep_value"])), []).append(r)
    out = []
    for (alg, _), group in cells.items():
        samples = [g["samples"] for g in group]
        n = len(samples)
        stderr = statistics.stdev(samples) / math.sqrt(n) if n > 1 else None
        out.append({"algorithm": alg, "sweep_value": group[0]["sweep_value"], "trials": n,
                    "mean": statistics.fmean(samples), "stderr": stderr,
                    "failures": sum(not g["correct"] for g in group)})
    return out


def format_summary(summary: list[dict]) -> str:
    lines = ["algorithm,sweep_value,trials,mean,stderr,failures"]
    for s in summary:
        stderr = "" if s["stderr"] is None else f"{s['stderr']:.6g}"
        lines.append(f"{s['algorithm']},{_fmt(s['sweep_value'])},{s['trials']},"
                     f"{s['mean']:.6g},{stderr},{s['failures']}")
    return "\n".join(lines)
