"""Command line entry point: ``transbandit {gen,design,run,experiment}``.

Exit codes: 0 success, 2 usage or input error, 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .design import DirectionSet, SolverConfig, directions, min_max_design, star_directions
from .env import GENERATORS, Instance, RewardOracle
from .errors import BanditError, InfeasibleDesignError
from .experiment import (ALGORITHMS, ConfigError, ExperimentConfig, format_summary,
                         rows_to_csv, run_algorithm, run_experiment, summarize)

EXIT_USAGE = 2
EXIT_RUNTIME = 3


class UsageError(Exception):
    pass


def _solver(args) -> SolverConfig:
    return SolverConfig(args.fw_max_iters, args.fw_tol, args.fw_threshold)


def _load_instance(path) -> Instance:
    try:
        return Instance.load(path)
    except (OSError, json.JSONDecodeError, ValueError, TypeError) as e:
        raise UsageError(f"cannot read instance {path}: {e}") from None


def _emit(obj, out) -> None:
    text = json.dumps(obj, indent=1)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def cmd_gen(args) -> int:
    kwargs = {}
    for item in args.param or []:
        key, _, val = item.partition("=")
        if not _:
            raise UsageError(f"--param expects key=value, got {item!r}")
        kwargs[key] = json.loads(val)
    try:
        inst = GENERATORS[args.generator](**kwargs)
    except TypeError as e:
        raise UsageError(str(e)) from None
    if args.out:
        inst.save(args.out)
    else:
        print(json.dumps(inst.to_dict(), indent=1))
    return 0


def cmd_design(args) -> int:
    inst = _load_instance(args.instance)
    if args.target == "all-pairs":
        dirs = directions(inst.items)
    elif args.target == "star":
        dirs = star_directions(inst.z_star, inst.items, inst.theta_star)
    elif args.target == "g-optimal":
        dirs = DirectionSet(inst.arms)
    else:
        if args.y is None:
            raise UsageError("--target single needs --y")
        dirs = DirectionSet(np.array(json.loads(args.y), dtype=float))
    design = min_max_design(inst.arms, dirs, _solver(args))
    _emit(design.to_dict(), args.out)
    return 0


def cmd_run(args) -> int:
    inst = _load_instance(args.instance)
    oracle = RewardOracle(inst, args.seed)
    res = run_algorithm(args.algorithm, inst, oracle, args.delta, args.eps, args.v, _solver(args))
    res.correct = res.recommended == inst.best
    _emit(res.to_dict(), args.out)
    return 0


def cmd_experiment(args) -> int:
    try:
        cfg = ExperimentConfig.load(args.config)
    except OSError as e:
        raise UsageError(str(e)) from None
    except ConfigError as e:
        raise UsageError(str(e)) from None
    if args.trials is not None:
        cfg.trials = args.trials
    if args.seed is not None:
        cfg.base_seed = args.seed
    if args.timing:
        cfg.record_timing = True
    rows = run_experiment(cfg, args.workers)
    text = rows_to_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(format_summary(summarize(rows)), file=sys.stderr if not args.out else sys.stdout)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="transbandit", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def solver_flags(sp):
        d = SolverConfig()
        sp.add_argument("--fw-max-iters", type=int, default=d.max_iters)
        sp.add_argument("--fw-tol", type=float, default=d.rel_tol)
        sp.add_argument("--fw-threshold", type=float, default=d.threshold)

    g = sub.add_parser("gen", help="write an instance JSON")
    g.add_argument("generator", choices=sorted(GENERATORS))
    g.add_argument("--param", action="append", help="generator argument as key=value")
    g.add_argument("--out")
    g.set_defaults(func=cmd_gen)

    d = sub.add_parser("design", help="solve a min-max design for an instance")
    d.add_argument("instance")
    d.add_argument("--target", choices=["all-pairs", "star", "g-optimal", "single"], default="all-pairs")
    d.add_argument("--y", help="JSON vector for --target single")
    d.add_argument("--out")
    solver_flags(d)
    d.set_defaults(func=cmd_design)

    r = sub.add_parser("run", help="run one algorithm on an instance")
    r.add_argument("instance")
    r.add_argument("--algorithm", choices=ALGORITHMS, default="rage")
    r.add_argument("--delta", type=float, default=0.05)
    r.add_argument("--eps", type=float, default=0.2)
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--v", type=float, default=1.1, help="growth base for static baselines")
    r.add_argument("--out")
    solver_flags(r)
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("experiment", help="seeded sweep from a JSON config")
    e.add_argument("config")
    e.add_argument("--out", help="CSV path (default stdout, summary then goes to stderr)")
    e.add_argument("--trials", type=int)
    e.add_argument("--seed", type=int, help="override base_seed")
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--timing", action="store_true", help="fill wall_ms (breaks byte-stability)")
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except InfeasibleDesignError as e:
        print(f"infeasible: {e}", file=sys.stderr)
        return EXIT_RUNTIME
    except (BanditError, ValueError, RuntimeError) as e:
        print(f"failed: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
