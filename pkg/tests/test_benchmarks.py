"""Mecanismos de referencia: planificador, certificado único y dos certificados."""

import numpy as np
import pytest

from certmenu.analysis import content_diversity, engagement
from certmenu.benchmarks import (
    crossing_cutoff,
    enforced_perfect,
    optimize_single,
    optimize_two_certificate,
    planner,
    planner_objective,
    serving_phi,
    single_certificate,
    single_certificate_dichotomy,
    theta_at_phi,
    two_certificate_profit,
)
from certmenu.exceptions import DomainError
from certmenu.mechanism_solver import effective_virtual_values, profit, solve_optimal, verify_ic
from certmenu.oracle import brute_single_profit


@pytest.fixture(scope="module")
def narrow_two_cert(narrow_cfg):
    return optimize_two_certificate(narrow_cfg)


class TestPlanner:

    def test_constant_views_and_perfect_quality(self, linear_small):
        sol = planner(linear_small)
        np.testing.assert_allclose(sol.views_good, 0.75)
        np.testing.assert_array_equal(sol.views_bad, 0.0)
        np.testing.assert_array_equal(sol.quality, 1.0)
        assert sol.label == "planner"

    def test_steeper_cost(self, make_cfg):
        sol = planner(make_cfg(sigma=3.0))
        np.testing.assert_allclose(sol.views_good, np.sqrt(0.75))

    def test_objective(self, linear_small):
        # 0.75 - 0.25·0.75 - 0.75²/2
        assert planner_objective(planner(linear_small), linear_small) == pytest.approx(0.28125)
        assert engagement(planner(linear_small)) == pytest.approx(0.75, abs=1e-12)


class TestSingleCertificate:

    def test_perfect_views(self, linear_small):
        sol = single_certificate(linear_small, 1.0).mechanism
        np.testing.assert_allclose(sol.views_good, np.maximum(sol.phi - 0.25, 0.0), atol=1e-12)
        assert sol.label == "enforced_perfect"

    def test_half_quality_views(self, linear_small):
        sol = single_certificate(linear_small, 0.5).mechanism
        np.testing.assert_allclose(sol.views_good, np.maximum((sol.phi + 1.0) / 2.0 - 0.5, 0.0), atol=1e-12)
        assert sol.label == "single_certificate"

    def test_serving_cutoffs(self, linear_small):
        assert content_diversity(enforced_perfect(linear_small).mechanism).lower == pytest.approx(0.625, abs=1e-9)
        assert content_diversity(single_certificate(linear_small, 0.5).mechanism).lower == pytest.approx(0.5, abs=1e-9)

    def test_perfect_engagement_and_profit(self, linear_cfg):
        result = enforced_perfect(linear_cfg)
        assert engagement(result.mechanism) == pytest.approx(0.140625, abs=1e-8)
        assert result.profit == pytest.approx(27.0 / 768.0, abs=1e-8)

    @pytest.mark.parametrize("lam", [0.0, -0.5, 1.5])
    def test_quality_domain(self, linear_small, lam):
        with pytest.raises(DomainError):
            single_certificate(linear_small, lam)

    def test_serving_phi(self, linear_small):
        assert serving_phi(linear_small, 1.0) == pytest.approx(0.25)
        assert serving_phi(linear_small, 0.5) == pytest.approx(0.0)
        assert theta_at_phi(linear_small, 0.25) == pytest.approx(0.625)
        assert theta_at_phi(linear_small, 5.0) is None

    def test_incentive_compatible(self, linear_small):
        assert verify_ic(single_certificate(linear_small, 0.7).mechanism).holds()

    def test_single_optimum_below_one_for_narrow_support(self, narrow_cfg):
        result = optimize_single(narrow_cfg)
        assert result.lam <= 1.0 - 1e-3
        assert result.profit >= enforced_perfect(narrow_cfg).profit

    def test_single_optimum_matches_exhaustive_search(self, narrow_cfg):
        result = optimize_single(narrow_cfg)
        brute = brute_single_profit(narrow_cfg, lambda_points=10**4)
        assert result.lam == pytest.approx(brute.lam, abs=1e-3)
        assert result.profit >= brute.profit - 1e-6 * abs(brute.profit)

    @pytest.mark.parametrize("lam", [0.2, 0.5, 0.8])
    def test_dichotomy(self, linear_small, lam):
        check = single_certificate_dichotomy(linear_small, lam)
        assert check.holds
        # en el ejemplo lineal λ = 0.5 sirve a más tipos que λ = 1
        if lam == 0.5:
            assert check.more_diverse


class TestTwoCertificates:

    def test_crossing_rule(self, linear_small):
        # R(φ, 1) = φ - 1/4 y R(φ, 1/2) = φ/2 se cruzan en φ = 1/2
        assert crossing_cutoff(linear_small, 0.5, 1.0) == pytest.approx(0.75, abs=1e-9)
        assert crossing_cutoff(linear_small, 0.6, 0.6) == 0.0

    def test_high_certificate_wins_above_cutoff(self, linear_small):
        cfg = linear_small
        theta_hat = crossing_cutoff(cfg, 0.3, 0.9)
        result = two_certificate_profit(cfg, 0.3, 0.9, theta_hat)
        sol = result.mechanism
        r_low = effective_virtual_values(cfg.attention, cfg.gamma, sol.phi, 0.3)
        r_high = effective_virtual_values(cfg.attention, cfg.gamma, sol.phi, 0.9)
        upper = sol.theta >= theta_hat
        np.testing.assert_array_equal(sol.quality[upper], 0.9)
        np.testing.assert_array_equal(sol.quality[~upper], 0.3)
        assert np.all(r_high[upper] >= r_low[upper] - 1e-12)
        assert np.all(r_high[~upper] <= r_low[~upper] + 1e-12)
        assert result.feasible

    def test_equal_qualities_reduce_to_single(self, linear_small):
        pair = two_certificate_profit(linear_small, 0.6, 0.6, 0.8)
        assert pair.profit == pytest.approx(single_certificate(linear_small, 0.6).profit, abs=1e-10)

    def test_zero_cutoff_uses_high_certificate(self, linear_small):
        pair = two_certificate_profit(linear_small, 0.3, 0.8, 0.0)
        assert pair.profit == single_certificate(linear_small, 0.8).profit

    def test_full_cutoff_uses_low_certificate(self, linear_small):
        pair = two_certificate_profit(linear_small, 0.3, 0.8, 1.0)
        assert pair.profit == single_certificate(linear_small, 0.3).profit

    def test_wrong_cutoff_is_flagged(self, linear_small):
        # en θ̂ = 0.65 la asignación cae de 0.075 a 0.05
        result = two_certificate_profit(linear_small, 0.5, 1.0, 0.65)
        assert not result.feasible
        assert np.isfinite(result.profit)

    @pytest.mark.parametrize("low, high, theta_hat", [
        (0.8, 0.3, 0.5), (0.0, 0.5, 0.5), (0.3, 0.8, 1.2),
    ])
    def test_invalid_menu(self, linear_small, low, high, theta_hat):
        with pytest.raises(DomainError):
            two_certificate_profit(linear_small, low, high, theta_hat)

    def test_two_distinct_certificates(self, narrow_two_cert):
        assert narrow_two_cert.lambda_high - narrow_two_cert.lambda_low >= 1e-3
        assert narrow_two_cert.feasible

    def test_profit_chain(self, narrow_cfg, narrow_two_cert):
        single = optimize_single(narrow_cfg)
        optimal = profit(solve_optimal(narrow_cfg), narrow_cfg).virtual_surplus
        tol = 1e-6 * abs(optimal)
        assert single.profit <= narrow_two_cert.profit + tol
        assert narrow_two_cert.profit <= optimal + tol
        assert narrow_two_cert.diagnostics["near_optimal_coarse_pairs"] >= 1
