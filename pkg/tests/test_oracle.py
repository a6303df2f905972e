"""Oráculos exhaustivos y su contraste con el solucionador."""

import numpy as np
import pytest

from certmenu.benchmarks import optimize_single
from certmenu.exceptions import ConfigError
from certmenu.oracle import (
    GridSpec,
    brute_argmax_quality,
    brute_single_profit,
    brute_views,
    cross_check_solver,
    oracle_lambda_grid,
    random_config,
)

COARSE = GridSpec(lambda_points=10**5, v_points=10**4)


def test_lambda_grid_layout():
    grid = oracle_lambda_grid(1000)
    assert grid.size == 1000
    assert grid[0] == pytest.approx(1e-8)
    assert grid[-1] == 1.0
    assert np.all(np.diff(grid) > 0)


class TestBruteArgmax:

    def test_interior_maximum(self, linear_cfg):
        best = brute_argmax_quality(0.5, linear_cfg, COARSE)
        assert best.lam == pytest.approx(np.sqrt(0.5), abs=best.step)

    def test_full_quality(self, linear_cfg):
        assert brute_argmax_quality(0.9, linear_cfg, COARSE).lam == 1.0


class TestBruteViews:

    def test_quadratic_cost(self, linear_cfg):
        seen = brute_views(0.5, 1.0, linear_cfg, COARSE)
        assert seen.views == pytest.approx(0.25, abs=seen.step)

    def test_negative_value_means_no_views(self, linear_cfg):
        assert brute_views(-0.5, 1.0, linear_cfg, COARSE).views == 0.0

    def test_cubic_cost(self, make_cfg):
        # R = 0.29 - 0.25 = 0.04 y c'(v) = v²
        seen = brute_views(0.29, 1.0, make_cfg(sigma=3.0), COARSE)
        assert seen.views == pytest.approx(0.2, abs=seen.step)


def test_brute_single_profit_agrees_with_optimizer(narrow_cfg):
    brute = brute_single_profit(narrow_cfg, lambda_points=2000, theta_points=2001)
    found = optimize_single(narrow_cfg)
    assert found.lam == pytest.approx(brute.lam, abs=2 * brute.step)
    assert found.profit == pytest.approx(brute.profit, rel=1e-4)


def test_random_configs_are_valid():
    rng = np.random.default_rng(7)
    for _ in range(20):
        cfg = random_config(rng)
        assert 0.02 < cfg.gamma < min(cfg.dist.theta_max, 1.0)


class TestCrossCheck:

    def test_linear_example(self, linear_cfg):
        report = cross_check_solver(linear_cfg, n_probes=20, seed=1, grid=COARSE)
        assert report.passed, report.failures

    def test_random_models(self):
        report = cross_check_solver(n_probes=20, seed=3, grid=COARSE)
        assert len(report.probes) == 20
        assert report.passed, report.failures

    def test_seed_is_reproducible(self, linear_cfg):
        first = cross_check_solver(linear_cfg, n_probes=5, seed=11, grid=COARSE)
        second = cross_check_solver(linear_cfg, n_probes=5, seed=11, grid=COARSE)
        assert first == second


@pytest.mark.parametrize("kwargs", [
    {"lambda_points": 1},
    {"v_points": 0},
    {"v_max": -1.0},
])
def test_grid_spec_validation(kwargs):
    with pytest.raises(ConfigError):
        GridSpec(**kwargs)


def test_equal_value_at_wrong_quality_is_rejected(linear_cfg, monkeypatch):
    import certmenu.oracle as oracle

    def misplaced_optimum(phis, cfg):
        best = brute_argmax_quality(phis[0], cfg, COARSE)
        lam = 0.5 * best.lam
        return [lam], [brute_views(phis[0], lam, cfg, COARSE).views], [best.value]

    monkeypatch.setattr(oracle, "pointwise_optimum", misplaced_optimum)
    report = cross_check_solver(linear_cfg, n_probes=3, seed=0, grid=COARSE)
    assert len(report.failures) == 3
    for probe in report.failures:
        assert probe.views == pytest.approx(probe.oracle_views)
        assert probe.quality == pytest.approx(0.5 * probe.oracle_quality)
