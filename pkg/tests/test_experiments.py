import math
import random
import statistics

import numpy as np
import pytest

from gfqc.application.services.construction import code_for_bits
from gfqc.application.services.experiments import (
    ExperimentService,
    aggregate,
    b_sweep,
    build_config,
    gamma_sweep,
    load_config,
    parse_config_text,
    rate_sweep,
    run_experiment,
    sample_seeds,
)
from gfqc.application.services.peeling import leaf_removal
from gfqc.application.services.rate_distortion import rd_bound
from gfqc.domain.errors import ConfigurationError
from gfqc.domain.models.results import SampleRecord
from gfqc.infrastructure.repositories.results import read_csv


def _reduced_seed(n_bits: int, rate: float, p: int, b: int) -> int:
    for seed in range(50):
        if leaf_removal(code_for_bits(n_bits, rate, p, seed, b)).is_empty_core:
            return seed
    raise AssertionError("no seed gives an empty core")


def _rows(items):
    return [item.as_row() for item in items]


@pytest.fixture(scope="module")
def tiny_config():
    seed = _reduced_seed(60, 0.5, 2, 1)
    return build_config(
        {
            "experiment": "gamma",
            "grid": [0.9, 0.95],
            "p": 2,
            "n_bits": 60,
            "rate": 0.5,
            "b": 1,
            "seed": seed,
            "gamma1": 0.99,
            "samples": 3,
            "master_seed": 11,
        }
    )


def test_parse_config_text():
    values = parse_config_text(
        """
        # gamma sweep on the small benchmark
        experiment = gamma
        grid = 0.88, 0.92  # two points
        n-bits = 160
        use_table = true
        """
    )
    assert values == {
        "experiment": "gamma",
        "grid": ["0.88", "0.92"],
        "n_bits": "160",
        "use_table": "true",
    }
    assert parse_config_text("grid = 0.5")["grid"] == ["0.5"]
    with pytest.raises(ConfigurationError):
        parse_config_text("experiment gamma")


def test_config_validation():
    config = build_config({"experiment": "rate", "grid": ["0.3", "0.5"], "samples": "4"})
    assert config.grid == [0.3, 0.5]
    assert config.samples == 4
    assert config.parameter == "rate"
    with pytest.raises(ConfigurationError, match="grid"):
        build_config({"experiment": "gamma", "grid": []})
    with pytest.raises(ConfigurationError):
        build_config({"experiment": "gamma", "grid": [1.2]})
    with pytest.raises(ConfigurationError):
        build_config({"experiment": "b", "grid": [1.5]})
    with pytest.raises(ConfigurationError):
        build_config({"experiment": "speed", "grid": [1]})
    with pytest.raises(ConfigurationError, match="seed"):
        build_config({"experiment": "gamma", "grid": [0.9], "seed": 2**64})
    with pytest.raises(ConfigurationError, match="b"):
        build_config({"experiment": "gamma", "grid": [0.9], "b": 2**16})
    with pytest.raises(ConfigurationError):
        build_config({"experiment": "b", "grid": [2**16]})


def test_point_settings():
    rates = build_config({"experiment": "rate", "grid": [0.5], "use_table": True})
    assert rates.point_settings(0.5) == {"rate": 0.5, "b": 5, "strength": 1.9, "gamma0": 0.92}
    gammas = build_config({"experiment": "gamma", "grid": [0.96], "strength": 1.2})
    assert gammas.point_settings(0.96)["gamma0"] == 0.96
    assert gammas.point_settings(0.96)["strength"] == 1.2
    bs = build_config({"experiment": "b", "grid": [3]})
    assert bs.point_settings(3.0)["b"] == 3


def test_load_config_with_overrides(tmp_path):
    path = tmp_path / "sweep.cfg"
    path.write_text("experiment=b\ngrid=1,2,3\nsamples=10\n")
    config = load_config(path, samples=2, jobs=None)
    assert config.grid == [1.0, 2.0, 3.0]
    assert config.samples == 2
    assert config.jobs == 1


def test_sample_seeds_are_distinct():
    seeds = {sample_seeds(0, g, s) for g in range(3) for s in range(10)}
    assert len(seeds) == 30
    assert sample_seeds(5, 1, 2) == sample_seeds(5, 1, 2)


def test_run_experiment(tiny_config):
    points, records = run_experiment(tiny_config)
    assert len(points) == 2
    assert len(records) == 6
    assert [(r.grid_index, r.sample) for r in records] == [
        (g, s) for g in range(2) for s in range(3)
    ]
    for point in points:
        assert point.parameter == "gamma0"
        assert point.samples == 3
        # one check removed from 15
        assert point.rate == pytest.approx(16 / 30)
        assert 0.0 <= point.distortion < 0.5
        assert 0.0 <= point.failure_rate <= 1.0
        assert point.shannon_distortion == pytest.approx(rd_bound(point.rate))

    again, again_records = gamma_sweep(tiny_config)
    np.testing.assert_equal(_rows(again_records), _rows(records))
    np.testing.assert_equal(_rows(again), _rows(points))


def test_worker_count_does_not_change_results(tiny_config):
    _, serial = run_experiment(tiny_config)
    _, parallel = run_experiment(tiny_config.model_copy(update={"jobs": 2}))
    np.testing.assert_equal(_rows(parallel), _rows(serial))


def test_aggregate_ignores_record_order(tiny_config):
    points, records = run_experiment(tiny_config)
    shuffled = list(records)
    random.Random(3).shuffle(shuffled)
    np.testing.assert_equal(_rows(aggregate(tiny_config, shuffled)), _rows(points))


def test_b_sweep_includes_the_unreduced_code(tiny_config):
    config = tiny_config.model_copy(update={"grid": [0.0, 1.0], "samples": 2})
    points, records = b_sweep(config)
    unreduced, reduced = points
    assert unreduced.parameter == "b"
    # the unreduced code keeps all 15 checks in its core
    assert unreduced.core_size == 15
    assert unreduced.rate == pytest.approx(0.5)
    assert reduced.core_size == 0
    assert reduced.rate == pytest.approx(16 / 30)
    assert [r.core_size for r in records] == [15, 15, 0, 0]
    for rec in records:
        assert rec.fallback or 0.0 <= rec.distortion < 0.5


def test_rate_sweep_with_tuned_table(tiny_config):
    config = tiny_config.model_copy(update={"grid": [0.5, 0.7], "use_table": True, "samples": 2})
    points, records = rate_sweep(config)
    assert [pt.value for pt in points] == [0.5, 0.7]
    assert points[0].rate == pytest.approx(16 / 30)
    assert points[1].rate == pytest.approx(22 / 30)
    assert all(pt.parameter == "rate" for pt in points)
    assert len(records) == 4
    for pt in points:
        assert pt.shannon_distortion == pytest.approx(rd_bound(pt.rate))


def test_failed_samples_are_left_out_of_the_distortion(tiny_config):
    records = [
        SampleRecord(0, 0.9, 0, 0.5, 0.1, 10, 1, False),
        SampleRecord(0, 0.9, 1, 0.5, math.nan, 30, 3, True),
        SampleRecord(0, 0.9, 2, 0.5, 0.2, 20, 1, False),
    ]
    (point,) = aggregate(tiny_config, records)
    assert point.distortion == pytest.approx(0.15)
    assert point.std_distortion == pytest.approx(statistics.stdev([0.1, 0.2]))
    assert point.failure_rate == pytest.approx(1 / 3)
    assert point.mean_iters == pytest.approx(20.0)
    assert point.samples == 3


def test_every_sample_failing_reports_no_distortion(tiny_config):
    config = tiny_config.model_copy(update={"ell_max": 1, "t_max": 1, "samples": 4})
    points, records = run_experiment(config)
    assert all(r.fallback and math.isnan(r.distortion) for r in records)
    for point in points:
        assert point.failure_rate == 1.0
        assert math.isnan(point.distortion)
        assert math.isnan(point.std_distortion)
        assert math.isnan(point.db_gap)


def test_experiment_service_writes_tables(tiny_config, tmp_path):
    service = ExperimentService(tiny_config.model_copy(update={"ell_max": 1, "t_max": 1}))
    with pytest.raises(ConfigurationError):
        service.write_tables("gamma_sweep", tmp_path)
    points = service.run()
    paths = service.write_tables("gamma_sweep", tmp_path)
    assert [p.name for p in paths] == ["gamma_sweep.csv", "gamma_sweep_samples.csv", "rd_bound.csv"]
    rows = read_csv(tmp_path / "gamma_sweep.csv")
    assert len(rows) == len(points) == 2
    # nan distortions are written as empty cells
    assert {r["distortion"] for r in rows} == {""}
    assert {r["distortion"] for r in read_csv(tmp_path / "gamma_sweep_samples.csv")} == {""}
