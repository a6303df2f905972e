#!/usr/bin/env python3
"""
Oráculos de Fuerza Bruta
========================
Verificadores independientes por enumeración en mallas densas. No hay
refinamiento: la densidad de la malla es la garantía. Se usan en los
tests y en el subcomando ``verify``.

Autor: Proyecto Certificación
Fecha: 2026
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .exceptions import ConfigError
from .mechanism_solver import effective_virtual_values, pointwise_optimum
from .model_core import (
    AttentionSpec,
    CostSpec,
    ModelConfig,
    TypeDistribution,
    conjugate_surplus,
    cost,
    inverse_marginal_cost,
    virtual_value_range,
    virtual_values,
)
from .numerics import last_argmax, merge_grid, piecewise_simpson

logger = logging.getLogger(__name__)

ORACLE_LOG_LOW = 1e-8
ORACLE_LOG_HIGH = 0.1
VALUE_RTOL = 1e-9
PROFIT_CHUNK = 256


@dataclass(frozen=True)
class GridSpec:
    lambda_points: int = 10**6
    v_points: int = 10**4
    v_max: float | None = None

    def __post_init__(self):
        if int(self.lambda_points) < 2:
            raise ConfigError("oracle.lambda_points", "lambda_points must be >= 2")
        if int(self.v_points) < 2:
            raise ConfigError("oracle.v_points", "v_points must be >= 2")
        if self.v_max is not None and not self.v_max > 0:
            raise ConfigError("oracle.v_max", "v_max must be positive")


def oracle_lambda_grid(n_points):
    """Malla log en [1e-8, 0.1) y uniforme en [0.1, 1], como la del solucionador."""
    n_log = n_points // 2
    return np.concatenate([
        np.geomspace(ORACLE_LOG_LOW, ORACLE_LOG_HIGH, n_log, endpoint=False),
        np.linspace(ORACLE_LOG_HIGH, 1.0, n_points - n_log),
    ])


def _local_step(grid, i):
    left = grid[i] - grid[i - 1] if i > 0 else 0.0
    right = grid[i + 1] - grid[i] if i + 1 < grid.size else 0.0
    return float(max(left, right))


class OracleArgmax(NamedTuple):
    lam: float
    value: float
    step: float


def brute_argmax_quality(phi_hat, cfg, grid=None):
    """
    Máximo exhaustivo de R(φ̂, ·) en la malla; empates al λ mayor.

    Returns:
        OracleArgmax: (λ, R, paso local de la malla)
    """
    grid = grid or GridSpec()
    lams = oracle_lambda_grid(int(grid.lambda_points))
    values = effective_virtual_values(cfg.attention, cfg.gamma, float(phi_hat), lams)
    i = int(last_argmax(values[None, :])[0])
    return OracleArgmax(lam=float(lams[i]), value=float(values[i]), step=_local_step(lams, i))


class OracleViews(NamedTuple):
    views: float
    step: float


def brute_views(phi_hat, lam, cfg, grid=None):
    """
    Máximo exhaustivo de R·v - c(v) en una malla uniforme de v.

    Si v_max no se da, se usa 10·c'^{-1}(θ̄), ampliado cuando el
    maximizador c'^{-1}(R) quedaría fuera.
    """
    grid = grid or GridSpec()
    value = float(effective_virtual_values(cfg.attention, cfg.gamma, float(phi_hat), float(lam)))
    v_max = grid.v_max
    if v_max is None:
        v_max = 10.0 * float(inverse_marginal_cost(cfg.cost, cfg.dist.theta_max))
        v_max = max(v_max, 1.5 * float(inverse_marginal_cost(cfg.cost, value)))
    views = np.linspace(0.0, v_max, int(grid.v_points))
    objective = value * views - cost(cfg.cost, views)
    i = int(np.argmax(objective))
    return OracleViews(views=float(views[i]), step=float(views[1] - views[0]))


class OracleProfit(NamedTuple):
    lam: float
    profit: float
    step: float


def brute_single_profit(cfg, lambda_points=10**4, theta_points=4001):
    """
    Π^s(λ) por cuadratura densa en cada λ de la malla; devuelve el máximo.

    Returns:
        OracleProfit: (λ, Π^s, paso local de la malla)
    """
    lams = oracle_lambda_grid(int(lambda_points))
    theta, _ = merge_grid(np.linspace(0.0, cfg.dist.theta_max, int(theta_points)),
                          cfg.dist.interior_nodes, 0.0)
    phi = virtual_values(cfg.dist, theta)
    pdf = cfg.dist.pdf(theta)
    profits = np.empty(lams.size)
    for start in range(0, lams.size, PROFIT_CHUNK):
        part = lams[start:start + PROFIT_CHUNK]
        value = effective_virtual_values(cfg.attention, cfg.gamma, phi[:, None], part[None, :])
        surplus = conjugate_surplus(cfg.cost, value) * pdf[:, None]
        profits[start:start + PROFIT_CHUNK] = piecewise_simpson(theta, surplus, cfg.dist.interior_nodes)
    i = int(last_argmax(profits[None, :])[0])
    return OracleProfit(lam=float(lams[i]), profit=float(profits[i]), step=_local_step(lams, i))


# ============================================================================
# CONTRASTE CON EL SOLUCIONADOR
# ============================================================================

def random_config(rng):
    """
    Configuración válida aleatoria: α ∈ [0.3, 3], σ ∈ (1.2, 4],
    θ̄ ∈ [0.5, 2], γ ∈ (0.02, min(θ̄, 1) - 0.02), F uniforme.
    """
    theta_max = rng.uniform(0.5, 2.0)
    upper = min(theta_max, 1.0) - 0.02
    return ModelConfig(
        attention=AttentionSpec(alpha=rng.uniform(0.3, 3.0)),
        cost=CostSpec(kappa=rng.uniform(0.5, 2.0), sigma=rng.uniform(1.2, 4.0)),
        dist=TypeDistribution.uniform(theta_max),
        gamma=rng.uniform(0.02, upper),
    )


class ProbeResult(NamedTuple):
    phi: float
    gamma: float
    alpha: float
    quality: float
    oracle_quality: float
    views: float
    oracle_views: float
    passed: bool


@dataclass(frozen=True)
class CrossCheckReport:
    probes: tuple

    @property
    def failures(self):
        return tuple(p for p in self.probes if not p.passed)

    @property
    def passed(self):
        return not self.failures


def _check_probe(phi_hat, cfg, grid):
    quality, views, value = pointwise_optimum([phi_hat], cfg)
    lam, v, r = float(quality[0]), float(views[0]), float(value[0])
    best = brute_argmax_quality(phi_hat, cfg, grid)
    seen = brute_views(phi_hat, lam, cfg, grid)
    slack = VALUE_RTOL * max(1.0, abs(best.value))
    value_ok = r >= best.value - slack
    quality_ok = abs(lam - best.lam) <= best.step
    views_ok = abs(v - seen.views) <= seen.step
    return ProbeResult(phi=float(phi_hat), gamma=cfg.gamma, alpha=cfg.attention.alpha,
                       quality=lam, oracle_quality=best.lam, views=v,
                       oracle_views=seen.views, passed=bool(value_ok and quality_ok and views_ok))


def cross_check_solver(cfg=None, n_probes=200, seed=0, grid=None):
    """
    Compara (Λ*, V*) del solucionador con los oráculos en φ̂ aleatorios.

    Con ``cfg=None`` cada sonda usa además una configuración aleatoria.
    Una sonda pasa si Λ* está a un paso de malla del argmax más alto y R no
    queda más de 1e-9 por debajo del máximo de la malla. V* debe quedar a un
    paso del óptimo de la malla de vistas.

    Returns:
        CrossCheckReport
    """
    rng = np.random.default_rng(seed)
    probes = []
    for _ in range(int(n_probes)):
        probe_cfg = cfg if cfg is not None else random_config(rng)
        low, high = virtual_value_range(probe_cfg.dist)
        result = _check_probe(rng.uniform(low, high), probe_cfg, grid)
        if not result.passed:
            logger.error("oracle mismatch: %s", result)
        probes.append(result)
    return CrossCheckReport(probes=tuple(probes))
