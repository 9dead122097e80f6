"""Exit criteria for the package, one test per criterion.

Each test appends a PASS/FAIL line that is printed in the terminal summary.
"""

import json
import statistics
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from transbandit.baselines import xy_oracle_run, xy_static_run
from transbandit.bounds import gauge, gauge_set, lower_bound, rho, theorem2_bound
from transbandit.cli import main
from transbandit.design import DirectionSet, directions, min_max_design
from transbandit.env import RewardOracle, gen_benchmark, gen_transductive, make_rng
from transbandit.linalg import design_matrix, inv_norms_sq
from transbandit.rage import rage_run
from transbandit.rounding import apportion, min_samples

DELTA = 0.05
EPS = 0.2
V = 1.1
TRIALS = 20


def report(number, name, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number:>2}. {name}: {detail}")
    assert ok, detail


def run_trials(inst, algorithm, trials=TRIALS, base_seed=2024):
    results = []
    for trial in range(trials):
        oracle = RewardOracle(inst, make_rng(base_seed, algorithm, inst.label, trial))
        if algorithm == "rage":
            res = rage_run(inst.arms, inst.items, DELTA, oracle, EPS)
        elif algorithm == "xy_static":
            res = xy_static_run(inst.arms, inst.items, DELTA, V, oracle, EPS)
        else:
            res = xy_oracle_run(inst.arms, inst.items, inst.theta_star, DELTA, V, oracle, EPS)
        results.append(res)
    return results


@pytest.fixture(scope="module")
def benchmark5():
    inst = gen_benchmark(5, 0.01)
    return inst, {alg: run_trials(inst, alg) for alg in ("rage", "xy_static", "xy_oracle")}


def mean_samples(results):
    return statistics.fmean(r.total_samples for r in results)


def test_01_kiefer_wolfowitz():
    t0 = time.perf_counter()
    rng = np.random.default_rng(1)
    errors = []
    for _ in range(50):
        X = rng.standard_normal((30, 5))
        assert np.linalg.matrix_rank(X) == 5
        errors.append(abs(min_max_design(X, DirectionSet(X)).value / 5 - 1))
    elapsed = time.perf_counter() - t0
    report(1, "G-optimal value equals d", max(errors) <= 0.05 and elapsed < 30,
           f"max rel err {max(errors):.4f} (tol 0.05), {elapsed:.1f}s (limit 30s)")


def test_02_closed_form_design():
    t0 = time.perf_counter()
    arms = np.eye(2)
    des = min_max_design(arms, DirectionSet([arms[0] - arms[1]]))
    elapsed = time.perf_counter() - t0
    ok = (abs(des.value - 4.0) <= 0.04 and np.all(np.abs(des.weights - 0.5) <= 0.02)
          and elapsed < 1)
    report(2, "two-arm closed form", ok,
           f"value {des.value:.4f} (4 +- 1%), weights {np.round(des.weights, 4).tolist()}, {elapsed:.2f}s")


def test_03_rounding_efficiency():
    t0 = time.perf_counter()
    rng = np.random.default_rng(3)
    exact = True
    worst = 0.0
    for _ in range(200):
        d = int(rng.integers(2, 6))
        X = rng.standard_normal((int(rng.integers(d, 3 * d + 1)), d))
        lam = rng.dirichlet(np.ones(len(X)))
        Y = rng.standard_normal((5, d))
        value = inv_norms_sq(Y, design_matrix(X, lam)).max()
        N = min_samples(d, EPS) + int(rng.integers(0, 1000))
        counts = apportion(lam, N).counts
        exact &= int(counts.sum()) == N
        worst = max(worst, inv_norms_sq(Y, design_matrix(X, counts)).max() / (value / N))
    elapsed = time.perf_counter() - t0
    report(3, "apportionment exact and (1+eps)-efficient", exact and worst <= 1 + EPS and elapsed < 30,
           f"exact={exact}, worst width ratio {worst:.4f} (limit {1 + EPS}), {elapsed:.1f}s")


def test_04_delta_pac_benchmark(benchmark5):
    inst, runs = benchmark5
    failures = {alg: sum(r.recommended != inst.best for r in res) for alg, res in runs.items()}
    report(4, "delta-PAC on benchmark d=5", all(f <= 2 for f in failures.values()),
           f"failures out of {TRIALS}: {failures} (limit 2 each)")


def test_05_figure_ordering(benchmark5):
    _, runs = benchmark5
    m = {alg: mean_samples(res) for alg, res in runs.items()}
    ok = m["xy_oracle"] <= m["rage"] and m["rage"] < 0.5 * m["xy_static"]
    report(5, "oracle <= RAGE < 0.5 static (d=5)", ok,
           f"means oracle {m['xy_oracle']:.0f}, rage {m['rage']:.0f}, static {m['xy_static']:.0f}; "
           f"rage/static = {m['rage'] / m['xy_static']:.3f} (need < 0.5)")


def test_06_theorem2_envelope(benchmark5):
    inst, runs = benchmark5
    bound = theorem2_bound(inst, DELTA, EPS)
    violations = sum(r.total_samples > bound for r in runs["rage"])
    worst = max(r.total_samples for r in runs["rage"])
    report(6, "RAGE samples within upper bound", violations == 0,
           f"{violations} violations; max samples {worst} vs bound {bound}")


def test_07_lower_bound_consistency(benchmark5):
    inst, runs = benchmark5
    lb = lower_bound(inst, DELTA)
    m = mean_samples(runs["rage"])
    report(7, "lower bound <= mean RAGE samples", lb <= m, f"lower bound {lb:.0f} vs mean {m:.0f}")


def test_08_gauge_sandwich():
    t0 = time.perf_counter()
    rng = np.random.default_rng(8)
    bad = []
    for k in range(100):
        d = int(rng.integers(2, 6))
        X = rng.standard_normal((int(rng.integers(d, 3 * d + 1)), d))
        X /= np.linalg.norm(X, axis=1)[:, None]
        Y = directions(rng.standard_normal((4, d))).directions
        value = rho(X, DirectionSet(Y))
        lower = np.max(np.sum(Y ** 2, axis=1)) / np.max(np.linalg.norm(X, axis=1))
        upper = d / gauge_set(X, Y) ** 2
        y = Y[0]
        single = rho(X, DirectionSet(y[None]))
        if not (lower <= value <= 1.05 * upper and single <= 1.05 / gauge(X, y) ** 2):
            bad.append(k)
    elapsed = time.perf_counter() - t0
    report(8, "gauge sandwich and singleton bound", not bad and elapsed < 60,
           f"{len(bad)} of 100 instances outside the 5% slack, {elapsed:.1f}s")


def test_09_adaptivity_effect():
    means = {}
    for alpha in (0.1, 0.01):
        inst = gen_benchmark(10, alpha)
        for alg in ("rage", "xy_static"):
            means[alg, alpha] = mean_samples(run_trials(inst, alg))
    rage_growth = means["rage", 0.01] / means["rage", 0.1]
    static_growth = means["xy_static", 0.01] / means["xy_static", 0.1]
    report(9, "RAGE grows < 3x, static > 10x as alpha shrinks 10x (d=10)",
           rage_growth < 3 and static_growth > 10,
           f"RAGE growth {rage_growth:.1f}x ({means['rage', 0.1]:.0f} -> {means['rage', 0.01]:.0f}), "
           f"static growth {static_growth:.1f}x")


def test_10_transductive_ordering():
    details, ok = [], True
    for d in (4, 8, 12):
        inst = gen_transductive(d)
        runs = {alg: run_trials(inst, alg) for alg in ("rage", "xy_static", "xy_oracle")}
        m = {alg: mean_samples(res) for alg, res in runs.items()}
        wins = sum(r.recommended == inst.best for r in runs["rage"])
        ok &= m["xy_oracle"] <= m["rage"] < m["xy_static"] and wins >= 18
        details.append(f"d={d}: oracle {m['xy_oracle']:.0f} rage {m['rage']:.0f} "
                       f"static {m['xy_static']:.0f}, rage correct {wins}/20")
    report(10, "transductive oracle <= RAGE < static", ok, "; ".join(details))


def test_11_experiment_determinism(tmp_path):
    cfg = {"generator": {"name": "many_arms"}, "algorithms": ["rage", "xy_static", "xy_oracle"],
           "delta": DELTA, "eps": 0.5, "trials": 3, "base_seed": 11, "v": V,
           "sweep": {"param": "n", "values": [3, 5]}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    outs = []
    for name in ("a.csv", "b.csv"):
        assert main(["experiment", str(path), "--out", str(tmp_path / name)]) == 0
        outs.append((tmp_path / name).read_bytes())
    report(11, "experiment CSV byte-identical on rerun", outs[0] == outs[1],
           f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}")
