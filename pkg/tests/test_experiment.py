import csv
import io
import json
import statistics

import pytest

from transbandit.cli import main
from transbandit.experiment import (CSV_FIELDS, ConfigError, ExperimentConfig, rows_to_csv,
                                    run_experiment, summarize)


def config(**over):
    base = {"generator": {"name": "benchmark", "params": {"alpha": 0.3}},
            "algorithms": ["rage", "xy_static", "xy_oracle"], "delta": 0.05, "eps": 0.2,
            "trials": 2, "base_seed": 3, "v": 1.2, "sweep": {"param": "d", "values": [2, 3]}}
    base.update(over)
    return base


def test_row_count_and_header():
    rows = run_experiment(ExperimentConfig.from_dict(config()))
    assert len(rows) == 2 * 2 * 3
    text = rows_to_csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_FIELDS)
    parsed = list(csv.DictReader(io.StringIO(text)))
    assert all(r["wall_ms"] == "" for r in parsed)
    for r in parsed:
        if r["algorithm"] == "rage":
            assert int(r["samples"]) <= int(r["theorem2_bound"])


def test_summary_means():
    rows = run_experiment(ExperimentConfig.from_dict(config()))
    for s in summarize(rows):
        cell = [r["samples"] for r in rows
                if r["algorithm"] == s["algorithm"] and r["sweep_value"] == s["sweep_value"]]
        assert s["mean"] == pytest.approx(statistics.fmean(cell))
    single = summarize(run_experiment(ExperimentConfig.from_dict(config(trials=1))))
    assert all(s["stderr"] is None for s in single)


def test_bad_configs():
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(config(generator={"name": "nope"}))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(config(sweep={"param": "n", "values": [3]}))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(config(generator={"name": "transductive"},
                                          sweep={"param": "d", "values": [4, 5]}))
    with pytest.raises(ConfigError):
        ExperimentConfig.from_dict(config(algorithms=["lingape"]))


def test_seeded_generator_sweep():
    cfg = ExperimentConfig.from_dict(config(generator={"name": "many_arms"},
                                            sweep={"param": "n", "values": [4]},
                                            algorithms=["xy_oracle"], eps=0.5))
    rows = run_experiment(cfg)
    assert len(rows) == 2 and all(r["correct"] for r in rows)


def test_cli_experiment_byte_identical(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(config()))
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["experiment", str(cfg), "--out", str(a)]) == 0
    assert main(["experiment", str(cfg), "--out", str(b), "--workers", "2"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert "algorithm,sweep_value,trials,mean,stderr,failures" in capsys.readouterr().out


def test_cli_experiment_param_mismatch(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps(config(sweep={"param": "n", "values": [3]})))
    assert main(["experiment", str(cfg)]) == 2
