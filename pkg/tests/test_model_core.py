"""Primitivas del modelo: atención, costes, distribuciones y validación."""

import numpy as np
import pytest

from certmenu.exceptions import ConfigError, DomainError, KinkError, RangeError, RegularityError
from certmenu.model_core import (
    AttentionSpec,
    CostSpec,
    ModelConfig,
    TypeDistribution,
    attention_deriv,
    attention_eval,
    check_regularity,
    conjugate_surplus,
    cost,
    inverse_marginal_cost,
    marginal_cost,
    virtual_value,
    virtual_value_inverse,
)

REGULAR_TAB = TypeDistribution.tabulated([0.0, 0.5, 1.0], [0.0, 0.4, 1.0])


class TestAttention:

    def test_power_family(self):
        assert attention_eval(AttentionSpec(alpha=0.5), 0.25) == pytest.approx(0.5)
        assert attention_eval(AttentionSpec(alpha=2.0), 0.5) == pytest.approx(0.25)

    def test_array_input_keeps_shape(self):
        out = attention_eval(AttentionSpec(alpha=1.0), np.array([0.0, 0.5, 1.0]))
        np.testing.assert_allclose(out, [0.0, 0.5, 1.0])

    def test_loss_transform(self):
        spec = AttentionSpec(alpha=1.0, loss_b=1.0)
        assert attention_eval(spec, 0.75) == pytest.approx(0.5)
        assert attention_eval(spec, 0.4) == 0.0
        assert attention_eval(spec, 1.0) == pytest.approx(1.0)

    def test_addiction_transform(self):
        spec = AttentionSpec(alpha=1.0, addiction_z=0.2)
        assert attention_eval(spec, 0.9) == pytest.approx(1.0)
        assert attention_eval(spec, 0.5) == pytest.approx(0.7)
        assert attention_eval(spec, 0.0) == pytest.approx(0.2)

    def test_out_of_domain(self):
        with pytest.raises(DomainError):
            attention_eval(AttentionSpec(), 1.5)
        with pytest.raises(ValueError):
            attention_eval(AttentionSpec(), -0.1)

    def test_derivative_chain_rule(self):
        spec = AttentionSpec(alpha=2.0, loss_b=1.0)
        # A = (2λ - 1)^2, A' = 4(2λ - 1)
        assert attention_deriv(spec, 0.75) == pytest.approx(2.0)
        assert attention_deriv(spec, 0.25) == 0.0

    @pytest.mark.parametrize("spec, kink", [
        (AttentionSpec(alpha=0.5), None),
        (AttentionSpec(alpha=2.0), None),
        (AttentionSpec(alpha=1.5, loss_b=0.5), 1.0 / 3.0),
        (AttentionSpec(alpha=0.7, addiction_z=0.1), 0.9),
    ])
    def test_derivative_matches_finite_difference(self, spec, kink):
        rng = np.random.default_rng(5)
        lam = rng.uniform(0.01, 0.99, 100)
        if kink is not None:
            lam = lam[np.abs(lam - kink) > 1e-3]
        h = 1e-6
        numeric = (attention_eval(spec, lam + h) - attention_eval(spec, lam - h)) / (2.0 * h)
        np.testing.assert_allclose(attention_deriv(spec, lam), numeric, rtol=1e-5, atol=1e-7)

    def test_loss_kink_reports_one_sided_derivatives(self):
        with pytest.raises(KinkError) as info:
            attention_deriv(AttentionSpec(alpha=1.0, loss_b=1.0), 0.5)
        assert info.value.left == 0.0
        assert info.value.right == pytest.approx(2.0)

    def test_addiction_kink(self):
        with pytest.raises(KinkError) as info:
            attention_deriv(AttentionSpec(alpha=1.5, addiction_z=0.2), 0.8)
        assert info.value.left == pytest.approx(1.5)
        assert info.value.right == 0.0

    def test_transforms_are_exclusive(self):
        with pytest.raises(ConfigError) as info:
            AttentionSpec(alpha=1.0, loss_b=0.5, addiction_z=0.1)
        assert info.value.key == "attention.addiction_z"

    def test_unknown_family(self):
        with pytest.raises(ConfigError):
            AttentionSpec(family="logistic")


class TestCost:

    def test_quadratic(self):
        spec = CostSpec(kappa=1.0, sigma=2.0)
        assert float(cost(spec, 0.5)) == pytest.approx(0.125)
        assert marginal_cost(spec, 0.5) == pytest.approx(0.5)
        assert inverse_marginal_cost(spec, 0.75) == pytest.approx(0.75)

    def test_inverse_marginal_cost_clips_at_zero(self):
        assert inverse_marginal_cost(CostSpec(), -0.3) == 0.0

    def test_cubic_and_kappa(self):
        spec = CostSpec(kappa=2.0, sigma=3.0)
        assert inverse_marginal_cost(spec, 0.5) == pytest.approx(0.5)
        assert marginal_cost(spec, 0.5) == pytest.approx(0.5)

    @pytest.mark.parametrize("kappa, sigma", [(1.0, 2.0), (2.0, 3.0), (0.5, 1.3), (1.5, 4.0)])
    def test_marginal_cost_inverts(self, kappa, sigma):
        spec = CostSpec(kappa=kappa, sigma=sigma)
        x = np.random.default_rng(3).uniform(0.0, 3.0, 100)
        np.testing.assert_allclose(marginal_cost(spec, inverse_marginal_cost(spec, x)), x, rtol=1e-10)

    def test_negative_views_rejected(self):
        with pytest.raises(DomainError):
            marginal_cost(CostSpec(), -1.0)

    def test_conjugate_surplus(self):
        spec = CostSpec(kappa=1.0, sigma=2.0)
        assert conjugate_surplus(spec, 0.5) == pytest.approx(0.125)
        assert conjugate_surplus(spec, -0.5) == 0.0
        # max_v (x v - c(v)) en el maximizador
        x = 0.7
        v = inverse_marginal_cost(CostSpec(sigma=3.0), x)
        expected = x * v - float(cost(CostSpec(sigma=3.0), v))
        assert conjugate_surplus(CostSpec(sigma=3.0), x) == pytest.approx(expected)

    @pytest.mark.parametrize("kwargs", [{"kappa": 0.0}, {"sigma": 1.0}])
    def test_invalid_parameters(self, kwargs):
        with pytest.raises(ConfigError):
            CostSpec(**kwargs)


class TestDistribution:

    def test_uniform_virtual_value(self):
        dist = TypeDistribution.uniform(1.0)
        assert virtual_value(dist, 0.75) == pytest.approx(0.5)
        assert virtual_value(dist, 0.0) == pytest.approx(-1.0)

    def test_virtual_value_domain(self):
        with pytest.raises(DomainError):
            virtual_value(TypeDistribution.uniform(1.0), 1.5)

    def test_uniform_inverse(self):
        dist = TypeDistribution.uniform(1.0)
        assert virtual_value_inverse(dist, 0.25) == pytest.approx(0.625)
        with pytest.raises(RangeError):
            virtual_value_inverse(dist, 2.0)

    def test_tabulated_cdf_and_pdf(self):
        assert float(REGULAR_TAB.cdf(0.25)) == pytest.approx(0.2)
        assert float(REGULAR_TAB.pdf(0.25)) == pytest.approx(0.8)
        # en el nodo se usa la densidad del tramo derecho
        assert float(REGULAR_TAB.pdf(0.5)) == pytest.approx(1.2)
        assert REGULAR_TAB.interior_nodes == (0.5,)

    def test_tabulated_inverse(self):
        assert virtual_value(REGULAR_TAB, 0.75) == pytest.approx(0.5)
        assert virtual_value_inverse(REGULAR_TAB, 0.5) == pytest.approx(0.75, abs=1e-9)
        # φ salta de -0.25 a 0 en θ = 0.5
        assert virtual_value_inverse(REGULAR_TAB, 0.0) == pytest.approx(0.5, abs=1e-9)

    def test_regularity(self):
        assert check_regularity(REGULAR_TAB).regular
        bad = TypeDistribution.tabulated([0.0, 0.5, 1.0], [0.0, 0.6, 1.0])
        report = check_regularity(bad)
        assert not report.regular
        assert report.violation_at == pytest.approx(0.5)

    @pytest.mark.parametrize("theta, cdf", [
        ([0.0, 0.5], [0.0, 0.5, 1.0]),
        ([0.1, 0.5, 1.0], [0.0, 0.5, 1.0]),
        ([0.0, 0.5, 1.0], [0.0, 0.5, 0.9]),
        ([0.0, 0.5, 1.0], [0.0, 0.0, 1.0]),
    ])
    def test_invalid_tabulated(self, theta, cdf):
        with pytest.raises(ConfigError):
            TypeDistribution.tabulated(theta, cdf)


class TestModelConfig:

    def _build(self, gamma=0.25, theta_max=1.0, attention=None, dist=None):
        return ModelConfig(attention=attention or AttentionSpec(), cost=CostSpec(),
                           dist=dist or TypeDistribution.uniform(theta_max), gamma=gamma)

    def test_gamma_bound(self):
        with pytest.raises(ConfigError, match=r"gamma must be < min\(theta_max, 1\)"):
            self._build(gamma=0.8, theta_max=0.7)

    def test_gamma_positive(self):
        with pytest.raises(ConfigError) as info:
            self._build(gamma=0.0)
        assert info.value.key == "model.gamma"

    def test_addiction_needs_low_attention_floor(self):
        with pytest.raises(ConfigError) as info:
            self._build(attention=AttentionSpec(alpha=1.0, addiction_z=0.3))
        assert info.value.key == "attention.addiction_z"
        assert self._build(attention=AttentionSpec(alpha=1.0, addiction_z=0.1)).gamma == 0.25

    def test_irregular_distribution(self):
        bad = TypeDistribution.tabulated([0.0, 0.5, 1.0], [0.0, 0.6, 1.0])
        with pytest.raises(RegularityError):
            self._build(dist=bad)
