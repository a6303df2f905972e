"""
Modelos aleatorios válidos con la malla por defecto: igualdad entre el
beneficio directo y el excedente virtual, orden de los mecanismos de
referencia, estática comparativa en γ y dicotomía frente a la
certificación perfecta.
"""

import numpy as np
import pytest

from certmenu.analysis import compare_to_perfect, sweep_gamma
from certmenu.benchmarks import enforced_perfect, optimize_single, optimize_two_certificate
from certmenu.mechanism_solver import profit, solve_optimal, verify_ic
from certmenu.oracle import random_config

pytestmark = pytest.mark.slow

SEED = 7
N_MODELS = 20
GAMMAS = [0.05, 0.1, 0.2, 0.3, 0.4]
REL_TOL = 1e-6


def _models(n, seed=SEED):
    rng = np.random.default_rng(seed)
    return [random_config(rng) for _ in range(n)]


MODELS = _models(N_MODELS)


def _describe(cfg):
    return (f"alpha={cfg.attention.alpha:.4f} sigma={cfg.cost.sigma:.4f} "
            f"kappa={cfg.cost.kappa:.4f} theta_max={cfg.dist.theta_max:.4f} gamma={cfg.gamma:.4f}")


def _at_most(low, high):
    return low <= high + REL_TOL * max(abs(low), abs(high)) + 1e-15


@pytest.mark.parametrize("cfg", MODELS, ids=[f"model{i}" for i in range(N_MODELS)])
class TestRandomModels:

    def test_direct_profit_equals_virtual_surplus(self, cfg):
        for sol in (solve_optimal(cfg), enforced_perfect(cfg).mechanism):
            report = profit(sol, cfg)
            assert report.relative_gap <= REL_TOL, f"{sol.label}: {report} ({_describe(cfg)})"
            assert verify_ic(sol).holds(), _describe(cfg)

    def test_benchmarks_are_nested(self, cfg):
        perfect = profit(enforced_perfect(cfg).mechanism, cfg).direct
        single = profit(optimize_single(cfg).mechanism, cfg).direct
        two = optimize_two_certificate(cfg)
        binary = profit(two.mechanism, cfg).direct
        optimal = profit(solve_optimal(cfg), cfg).direct
        chain = (perfect, single, binary, optimal)
        assert _at_most(perfect, single), (chain, _describe(cfg))
        assert _at_most(single, binary), (chain, _describe(cfg))
        assert _at_most(binary, optimal), (chain, _describe(cfg))

    def test_perfect_certification_dichotomy(self, cfg):
        assert compare_to_perfect(cfg).dichotomy_holds, _describe(cfg)


@pytest.mark.parametrize("cfg", MODELS[:10], ids=[f"model{i}" for i in range(10)])
def test_quality_increases_with_gamma(cfg):
    result = sweep_gamma(cfg, GAMMAS)
    assert result.holds, (result.violations, _describe(cfg))


@pytest.mark.parametrize("cfg", _models(50, seed=SEED + 1), ids=[f"model{i}" for i in range(50)])
def test_optimal_mechanism_is_monotone(cfg):
    sol = solve_optimal(cfg)
    assert not sol.diagnostics["internal_error"], _describe(cfg)
    assert np.min(np.diff(sol.quality)) >= -1e-9, _describe(cfg)
    assert np.min(np.diff(sol.views_good)) >= -1e-9, _describe(cfg)
