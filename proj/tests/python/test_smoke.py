import json
import math

import pytest

import edgesim as es


def small_config(**overrides):
    cfg = json.loads(es.default_config())
    cfg["topology"]["grid_rows"] = 3
    cfg["topology"]["grid_cols"] = 3
    cfg["controller"]["power_budget_Q"] = 430.0
    cfg["slots"] = 20
    cfg.update(overrides)
    return cfg


def test_version():
    assert es.__version__ == "0.1.0"


def test_topology_counts():
    topo = es.build_grid_topology(3, 3, 1.0, 3.0, 140.0)
    assert topo.num_regions == 9
    assert topo.num_stations == 4
    assert es.minimum_cover_size(topo) == 4
    assert es.coverage_feasible(topo, [1, 1, 1, 1])
    assert not es.coverage_feasible(topo, [0, 1, 1, 1])
    assert topo.covers(0, 0)
    assert json.loads(topo.to_json())["regions"]


def test_default_config_is_json():
    cfg = json.loads(es.default_config())
    assert cfg["policy"] == "ENGINE"
    assert cfg["topology"]["grid_rows"] == 5
    assert es.min_cover() == 9


def test_run_summary():
    result = es.run(small_config(), seed=5)
    assert result.seed == 5
    assert len(result.rows) == 20
    assert result.mean_delay_cost > 0
    assert result.mean_power > 0
    assert result.final_queue >= 0
    assert sum(result.sleep_histogram) == 20

    summary = json.loads(result.summary_json())
    assert summary["format"] == "edgesim-summary-v1"
    assert summary["policy"] == "ENGINE"
    for key in (
        "mean_delay_cost",
        "mean_power",
        "final_deficit_queue",
        "mean_sleeping",
        "messages",
        "flagged_slots",
        "bound_check",
    ):
        assert key in summary


def test_run_is_deterministic():
    a = es.run(small_config(), seed=7)
    b = es.run(small_config(), seed=7)
    assert a.summary_json() == b.summary_json()


def test_batch_keeps_seed_order():
    results = es.run_batch(small_config(), seeds=[9, 2])
    assert [r.seed for r in results] == [9, 2]
    solo = es.run(small_config(), seed=2)
    assert results[1].summary_json() == solo.summary_json()


def test_policies():
    for policy in ("STSC", "PCU", "DCU"):
        result = es.run(small_config(policy=policy), seed=1)
        assert json.loads(result.summary_json())["policy"] == policy
    with pytest.raises(ValueError):
        es.run(small_config(policy="engine"))  # names are uppercase
    with pytest.raises(ValueError):
        es.run({"mystery": 1})


def test_sweep_and_bounds():
    sweep = es.run_sweep(small_config(), "Q", [420.0, 520.0], seeds=[1])
    assert [p.value for p in sweep.points] == [420.0, 520.0]
    assert "mean_power" in sweep.trend

    report = es.verify_bounds(small_config(), seeds=[1, 2])
    assert report.seeds == 2
    assert report.telescoping_ok
    assert report.mean_delay_cost <= report.delay_bound


def test_solver_matches_enumeration():
    topo = es.build_grid_topology(3, 3, 1.0, 3.0, 140.0)
    params = es.ModelParams()
    inp = es.SlotInput([1.0] * 9, [2.0] * 4)
    best = es.exhaustive_oracle(topo, params, inp, 200.0, 0.0)
    warm = es.Decision([1, 1, 1, 1], [0.0] * 4)
    cfg = es.RejoConfig()
    cfg.temperature = 1e-3
    cfg.max_iterations = 800
    cfg.stall_window = 800
    cfg.seed = 3
    got = es.rejo_solve(topo, params, inp, 200.0, 0.0, warm, cfg)
    m_best = es.evaluate_slot(topo, params, best, inp)
    m_got = es.evaluate_slot(topo, params, got, inp)
    assert m_got.delay_total == pytest.approx(m_best.delay_total, abs=1e-9)


def test_gibbs_check():
    res = es.gibbs_check(stations=2, temperature=0.5, iterations=20000, seed=3)
    assert res.total_variation < 0.05
    assert math.isclose(sum(s.expected for s in res.states), 1.0, rel_tol=1e-9)


def test_stats_helpers():
    assert es.settle_iteration([5.0, 5.0, 5.0], 0.01) == 1
    assert es.spearman([1.0, 2.0, 3.0], [30.0, 20.0, 10.0]) == pytest.approx(-1.0)


def test_exceptions():
    topo = es.build_grid_topology(3, 3, 1.0, 3.0, 140.0)
    with pytest.raises(es.CoverageError):
        es.bs_arrivals(topo, [0, 0, 0, 0], [1.0] * 9)
    assert issubclass(es.InfeasibleError, Exception)
    assert issubclass(es.IoError, Exception)
