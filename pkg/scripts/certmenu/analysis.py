#!/usr/bin/env python3
"""
Análisis del Mecanismo
======================
Engagement, bienestar del consumidor, diversidad de contenido,
comparación con la certificación perfecta impuesta, estática comparativa
(γ, κ, α, b, z) y límites para γ pequeño.

Autor: Proyecto Certificación
Fecha: 2026
"""

from __future__ import annotations

import logging
import multiprocessing as mp
import warnings
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np
import pandas as pd
from scipy import integrate

from .benchmarks import enforced_perfect, optimize_two_certificate, theta_at_phi
from .exceptions import ConfigError, UnsupportedError
from .mechanism_solver import (
    SERVED_TOL,
    base_theta_grid,
    pointwise_optimum,
    profit,
    solve_optimal,
)
from .model_core import (
    AttentionSpec,
    CostSpec,
    ModelConfig,
    TypeDistribution,
    attention_values,
    virtual_values,
)
from .numerics import locate_threshold, piecewise_simpson

logger = logging.getLogger(__name__)

QUALITY_TOL = 1e-6
KAPPA_QUALITY_TOL = 1e-8
VIEWS_TOL = 1e-9
WELFARE_RTOL = 1e-6
THRESHOLD_TOL = 1e-8
LIMIT_PROBES = (0.0, 0.3, 0.6)
LIMIT_ATOL = 0.05


# ============================================================================
# ENGAGEMENT Y BIENESTAR
# ============================================================================

def engagement(sol, cfg=None):
    """Engagement total ∫ A(Λ)V_g f dθ por Simpson a tramos."""
    return float(piecewise_simpson(sol.theta, sol.allocation * sol.pdf, sol.breakpoints))


class WelfareReport(NamedTuple):
    welfare: float
    direct: float
    engagement: float
    relative_gap: float


def _read_value(spec, lam):
    """∫₀^λ q dA(q) para la atención base."""
    if lam <= 0:
        return 0.0
    value, _ = integrate.quad(lambda q: q * float(spec.base_slope(q)), 0.0, lam,
                              epsabs=1e-14, epsrel=1e-12, limit=200)
    return value


def consumer_welfare_power(sol, cfg):
    """
    Bienestar del consumidor con atención potencia A(λ) = λ^α.

    Se calcula el integrando directo V_g(A(λ) - (1/λ)∫₀^λ q dA(q)) con
    una cuadratura interior por cada calidad distinta y se contrasta con
    engagement/(α+1).

    Returns:
        WelfareReport: bienestar, valor directo, engagement y discrepancia

    Raises:
        UnsupportedError: si la familia de atención no es potencia
    """
    spec = cfg.attention
    if spec.family != "power":
        raise UnsupportedError(f"welfare is only defined for power attention, got {spec.family!r}")
    total = engagement(sol, cfg)
    if spec.transformed:
        warnings.warn("welfare with loss/addiction transforms is reported as engagement only",
                      RuntimeWarning, stacklevel=2)
        return WelfareReport(welfare=total, direct=total, engagement=total, relative_gap=0.0)

    levels, inverse = np.unique(sol.quality, return_inverse=True)
    inner = np.array([_read_value(spec, float(lam)) for lam in levels])[inverse]
    with np.errstate(divide="ignore", invalid="ignore"):
        per_view = np.where(sol.quality > 0, sol.attention - inner / sol.quality, 0.0)
    direct = float(piecewise_simpson(sol.theta, sol.views_good * per_view * sol.pdf,
                                     sol.breakpoints))
    welfare = total / (spec.alpha + 1.0)
    scale = max(abs(welfare), abs(direct))
    gap = 0.0 if scale == 0 else abs(welfare - direct) / scale
    if gap > WELFARE_RTOL:
        logger.warning("welfare mismatch: engagement/(alpha+1)=%.12g direct=%.12g", welfare, direct)
    return WelfareReport(welfare=welfare, direct=direct, engagement=total, relative_gap=gap)


# ============================================================================
# DIVERSIDAD DE CONTENIDO
# ============================================================================

@dataclass(frozen=True)
class ServingSet:
    """Unión de intervalos de θ servidos y su masa bajo F."""

    intervals: tuple
    measure: float

    @property
    def lower(self):
        return self.intervals[0][0] if self.intervals else None

    def contains(self, other, tol=0.0):
        """Cada intervalo de ``other`` cabe en alguno de este conjunto."""
        return all(any(a - tol <= c and d <= b + tol for a, b in self.intervals)
                   for c, d in other.intervals)


def _runs(mask):
    """Pares (inicio, fin) de índices de los tramos verdaderos."""
    edges = np.diff(np.concatenate([[0], np.asarray(mask, dtype=np.int8), [0]]))
    starts = np.flatnonzero(edges == 1)
    stops = np.flatnonzero(edges == -1) - 1
    return list(zip(starts.tolist(), stops.tolist()))


def _mass(sol, intervals):
    return float(sum(np.interp(b, sol.theta, sol.cdf) - np.interp(a, sol.theta, sol.cdf)
                     for a, b in intervals))


def content_diversity(sol, tol=SERVED_TOL):
    """
    Conjunto servido {θ : V_g(θ) > tol}.

    Los extremos se afinan por bisección sobre el interpolante lineal de
    V_g entre el último nodo no servido y el primero servido.

    Args:
        sol (MechanismSolution): Mecanismo
        tol (float): Umbral de servicio

    Returns:
        ServingSet: intervalos y masa ∫ dF sobre ellos
    """
    theta, views = sol.theta, sol.views_good
    width = 1e-12 * max(float(theta[-1]), 1.0)

    def served(t):
        return bool(np.interp(t, theta, views) > tol)

    intervals = []
    for i0, i1 in _runs(views > tol):
        a, b = float(theta[i0]), float(theta[i1])
        if i0 > 0:
            a = float(locate_threshold(served, theta[i0 - 1], theta[i0], width).first_true)
        if i1 < theta.size - 1:
            bracket = locate_threshold(lambda t: not served(t), theta[i1], theta[i1 + 1], width)
            b = float(bracket.last_false)
        intervals.append((a, b))
    return ServingSet(intervals=tuple(intervals), measure=_mass(sol, intervals))


def served_at_loss(sol, cfg):
    """
    Tipos servidos con φ(θ)A(Λ(θ)) < γ: pagan menos que su coste medio y
    se sirven para sostener la calidad del certificado.
    """
    mask = (sol.views_good > SERVED_TOL) & (sol.phi * sol.attention < cfg.gamma)
    intervals = tuple((float(sol.theta[i]), float(sol.theta[j])) for i, j in _runs(mask))
    return ServingSet(intervals=intervals, measure=_mass(sol, intervals))


class DiversityGap(NamedTuple):
    optimal: ServingSet
    binary: ServingSet
    holds: bool


def binary_diversity_gap(cfg):
    """El óptimo sin restricciones sirve al menos a los tipos que sirve el de dos certificados."""
    optimal = content_diversity(solve_optimal(cfg))
    binary = content_diversity(optimize_two_certificate(cfg).mechanism)
    step = cfg.dist.theta_max / (cfg.grid.theta_points - 1)
    holds = optimal.contains(binary, tol=step)
    if not holds:
        logger.error("optimal serving set %s does not contain binary serving set %s",
                     optimal.intervals, binary.intervals)
    return DiversityGap(optimal=optimal, binary=binary, holds=holds)


# ============================================================================
# COMPARACIÓN CON CERTIFICACIÓN PERFECTA
# ============================================================================

COMPARISON_COLUMNS = ["theta", "phi", "engagement_optimal", "engagement_perfect", "delta"]


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    theta: np.ndarray
    phi: np.ndarray
    engagement_optimal: np.ndarray
    engagement_perfect: np.ndarray
    delta: np.ndarray
    total_optimal: float
    total_perfect: float
    diversity_optimal: ServingSet
    diversity_perfect: ServingSet
    dichotomy_holds: bool = True

    def to_frame(self):
        return pd.DataFrame({
            "theta": self.theta,
            "phi": self.phi,
            "engagement_optimal": self.engagement_optimal,
            "engagement_perfect": self.engagement_perfect,
            "delta": self.delta,
        }, columns=COMPARISON_COLUMNS)


def perfect_certification_dichotomy(cfg, sol):
    """
    O bien Λ* ≡ 1 en el conjunto servido, o bien hay tipos con φ > γ y
    Λ* < 1 y tipos con φ < γ servidos.

    Se evalúa con los umbrales φ_s (servicio) y φ_1 (calidad perfecta)
    que el solucionador localiza por bisección.
    """
    serving = sol.diagnostics.get("serving_cutoff")
    if serving is None:
        return True
    full = sol.diagnostics.get("full_quality_cutoff")
    phi_s = float(virtual_values(cfg.dist, serving))
    phi_1 = np.inf if full is None else float(virtual_values(cfg.dist, full))
    if phi_1 <= phi_s + THRESHOLD_TOL:
        return True
    return phi_1 > cfg.gamma and phi_s < cfg.gamma


def compare_to_perfect(cfg):
    """
    Compara el óptimo con la certificación perfecta impuesta en una
    malla común.

    Returns:
        ComparisonReport: engagement por tipo y total, diversidad y el
            resultado de la dicotomía (un fallo se registra como ERROR)
    """
    cut = theta_at_phi(cfg, cfg.gamma)
    optimal = solve_optimal(cfg, extra_points=[] if cut is None else [cut])
    perfect = enforced_perfect(cfg, extra_points=optimal.breakpoints).mechanism

    eng_optimal = optimal.allocation
    eng_perfect = np.interp(optimal.theta, perfect.theta, perfect.allocation)
    holds = perfect_certification_dichotomy(cfg, optimal)
    if not holds:
        logger.error("perfect-certification dichotomy violated (gamma=%.6g)", cfg.gamma)
    return ComparisonReport(
        theta=optimal.theta,
        phi=optimal.phi,
        engagement_optimal=eng_optimal,
        engagement_perfect=eng_perfect,
        delta=eng_optimal - eng_perfect,
        total_optimal=engagement(optimal),
        total_perfect=engagement(perfect),
        diversity_optimal=content_diversity(optimal),
        diversity_perfect=content_diversity(perfect),
        dichotomy_holds=holds,
    )


# ============================================================================
# ESTÁTICA COMPARATIVA
# ============================================================================

SWEEP_PARAMETERS = ("gamma", "kappa", "alpha", "b", "z")


@dataclass(frozen=True, eq=False)
class SweepResult:
    """
    Soluciones de un barrido, muestreadas en la malla base de θ.

    ``quality`` y ``views`` tienen una fila por valor del parámetro.
    """

    parameter: str
    values: np.ndarray
    theta: np.ndarray
    quality: np.ndarray
    views: np.ndarray
    profit: np.ndarray
    engagement: np.ndarray
    diversity: np.ndarray
    serving_lower: np.ndarray
    violations: list = field(default_factory=list)

    @property
    def holds(self):
        return not self.violations

    def summary_frame(self):
        return pd.DataFrame({
            "value": self.values,
            "profit": self.profit,
            "engagement": self.engagement,
            "diversity": self.diversity,
            "serving_lower": self.serving_lower,
        })

    def to_frame(self):
        n = self.theta.size
        return pd.DataFrame({
            "value": np.repeat(self.values, n),
            "theta": np.tile(self.theta, self.values.size),
            "lambda": self.quality.ravel(),
            "v_good": self.views.ravel(),
        })


def with_parameter(cfg, name, value):
    """Copia validada de cfg con un parámetro cambiado."""
    value = float(value)
    if name == "gamma":
        return replace(cfg, gamma=value)
    if name == "kappa":
        return replace(cfg, cost=replace(cfg.cost, kappa=value))
    if name == "alpha":
        return replace(cfg, attention=replace(cfg.attention, alpha=value))
    if name == "b":
        return replace(cfg, attention=replace(cfg.attention, loss_b=value))
    if name == "z":
        return replace(cfg, attention=replace(cfg.attention, addiction_z=value))
    raise ConfigError("sweep.parameter", f"unknown parameter {name!r}, expected one of {SWEEP_PARAMETERS}")


def parallel_map(func, items, n_jobs=1):
    """map en orden; con n_jobs > 1 usa un Pool de procesos."""
    items = list(items)
    if n_jobs is None or n_jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with mp.Pool(processes=min(int(n_jobs), len(items))) as pool:
        return pool.map(func, items)


def _solve_point(cfg):
    sol = solve_optimal(cfg)
    base = base_theta_grid(cfg)
    served = content_diversity(sol)
    return {
        "quality": np.interp(base, sol.theta, sol.quality),
        "views": np.interp(base, sol.theta, sol.views_good),
        "profit": profit(sol, cfg).virtual_surplus,
        "engagement": engagement(sol),
        "diversity": served.measure,
        "serving_lower": np.nan if served.lower is None else served.lower,
    }


def _run_sweep(cfg, name, values, n_jobs):
    values = np.asarray(values, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ConfigError("sweep.values", "need at least one value")
    if np.any(np.diff(values) <= 0):
        raise ConfigError("sweep.values", "values must be strictly increasing")
    configs = [with_parameter(cfg, name, v) for v in values]
    points = parallel_map(_solve_point, configs, n_jobs)
    logger.info("sweep %s: %d puntos resueltos", name, len(points))
    return SweepResult(
        parameter=name,
        values=values,
        theta=base_theta_grid(cfg),
        quality=np.vstack([p["quality"] for p in points]),
        views=np.vstack([p["views"] for p in points]),
        profit=np.array([p["profit"] for p in points]),
        engagement=np.array([p["engagement"] for p in points]),
        diversity=np.array([p["diversity"] for p in points]),
        serving_lower=np.array([p["serving_lower"] for p in points]),
    )


def _report(result, message):
    logger.error("sweep %s: %s", result.parameter, message)
    result.violations.append(message)


def _check_quality_order(result, lower, upper, mask=None):
    """Λ[upper] >= Λ[lower] - QUALITY_TOL en los nodos de mask."""
    gap = result.quality[upper] - result.quality[lower]
    if mask is not None:
        gap = np.where(mask, gap, 0.0)
    worst = int(np.argmin(gap))
    if gap[worst] < -QUALITY_TOL:
        _report(result, f"quality decreases from {result.parameter}={result.values[lower]:g} "
                        f"to {result.values[upper]:g} at theta={result.theta[worst]:.6g} "
                        f"({gap[worst]:.3e})")


def _check_nested(result, lower, upper):
    """
    Donde la fila ``upper`` sirve, la fila ``lower`` también sirve y con
    calidad no mayor.
    """
    served_upper = result.views[upper] > VIEWS_TOL
    served_lower = result.views[lower] > SERVED_TOL
    orphan = np.flatnonzero(served_upper & ~served_lower)
    if orphan.size:
        _report(result, f"serving sets not nested between {result.values[lower]:g} and "
                        f"{result.values[upper]:g} (theta={result.theta[orphan[0]]:.6g})")
    _check_quality_order(result, lower, upper, served_upper & served_lower)


def sweep_gamma(cfg, values, n_jobs=1):
    """Λ* es no decreciente en γ tipo a tipo."""
    result = _run_sweep(cfg, "gamma", values, n_jobs)
    for k in range(result.values.size - 1):
        _check_quality_order(result, k, k + 1)
    return result


def sweep_kappa(cfg, values, n_jobs=1):
    """
    Λ* no depende de κ, V* es no creciente en κ y el conjunto servido
    es el mismo.
    """
    result = _run_sweep(cfg, "kappa", values, n_jobs)
    step = cfg.dist.theta_max / (cfg.grid.theta_points - 1)
    scale = max(1.0, float(np.max(result.views)))
    for k in range(1, result.values.size):
        drift = float(np.max(np.abs(result.quality[k] - result.quality[0])))
        if drift > KAPPA_QUALITY_TOL:
            _report(result, f"quality changes with kappa (max drift {drift:.3e})")
        rise = float(np.max(result.views[k] - result.views[k - 1]))
        if rise > VIEWS_TOL * scale:
            _report(result, f"views increase with kappa ({rise:.3e})")
        a, b = result.serving_lower[k], result.serving_lower[0]
        if not (np.isnan(a) and np.isnan(b)) and not abs(a - b) <= step:
            _report(result, f"serving cutoff moves with kappa ({b:.6g} -> {a:.6g})")
    return result


def sweep_alpha(cfg, values, n_jobs=1):
    """Con α mayor se sirve a menos tipos y con calidad mayor."""
    result = _run_sweep(cfg, "alpha", values, n_jobs)
    for k in range(result.values.size - 1):
        _check_nested(result, k, k + 1)
    return result


def sweep_losses(cfg, values, n_jobs=1):
    """Con b mayor se sirve a menos tipos y con calidad mayor."""
    if np.any(np.asarray(values, dtype=float) < 0):
        raise ConfigError("attention.loss_b", "loss_b values must be nonnegative")
    result = _run_sweep(cfg, "b", values, n_jobs)
    for k in range(result.values.size - 1):
        _check_nested(result, k, k + 1)
    return result


def sweep_addiction(cfg, values, n_jobs=1):
    """
    Con z mayor se sirve a más tipos y con calidad menor.

    Raises:
        ConfigError: si algún z <= 0 o z >= A^{-1}(γ)
    """
    if np.any(np.asarray(values, dtype=float) <= 0):
        raise ConfigError("attention.addiction_z", "addiction_z values must be positive")
    result = _run_sweep(cfg, "z", values, n_jobs)
    for k in range(result.values.size - 1):
        _check_nested(result, k + 1, k)
    return result


SWEEPS = {
    "gamma": sweep_gamma,
    "kappa": sweep_kappa,
    "alpha": sweep_alpha,
    "b": sweep_losses,
    "z": sweep_addiction,
}


# ============================================================================
# LÍMITES PARA γ PEQUEÑO
# ============================================================================

@dataclass(frozen=True, eq=False)
class LimitReport:
    alpha: float
    sigma: float
    gammas: np.ndarray
    probes: np.ndarray
    quality: np.ndarray
    engagement: np.ndarray
    regime: str
    limit: float
    trend_holds: bool
    quality_to_zero: bool

    @property
    def holds(self):
        return self.trend_holds and self.quality_to_zero

    def to_frame(self):
        m, p = self.quality.shape
        return pd.DataFrame({
            "gamma": np.repeat(self.gammas, p),
            "phi": np.tile(self.probes, m),
            "lambda": self.quality.ravel(),
            "engagement": self.engagement.ravel(),
        })


def _probe_config(alpha, sigma, gamma):
    return ModelConfig(attention=AttentionSpec(alpha=alpha), cost=CostSpec(kappa=1.0, sigma=sigma),
                       dist=TypeDistribution.uniform(1.0), gamma=gamma)


def _probe_optimum(alpha, sigma, gammas, probes):
    quality = np.empty((gammas.size, probes.size))
    reads = np.empty_like(quality)
    for i, gamma in enumerate(gammas):
        cfg = _probe_config(alpha, sigma, float(gamma))
        lam, views, _ = pointwise_optimum(probes, cfg)
        quality[i] = lam
        reads[i] = attention_values(cfg.attention, lam) * views
    return quality, reads


def _decreasing_gammas(gammas):
    gammas = np.asarray(gammas, dtype=float)
    if gammas.ndim != 1 or gammas.size < 2 or np.any(np.diff(gammas) >= 0):
        raise ConfigError("limits.gammas", "need at least two strictly decreasing gamma values")
    if np.any(gammas <= 0) or np.any(gammas >= 1):
        raise ConfigError("limits.gammas", "gamma values must lie in (0, 1)")
    return gammas


def small_gamma_limits(alpha, sigma, gammas, probes=LIMIT_PROBES):
    """
    Engagement por tipo A(Λ*)V* en φ̂ fijos cuando γ → 0 (atención
    λ^α cóncava, coste v^σ/σ).

    Si α > 1/σ el engagement tiende a 0, si α = 1/σ a α^{1/(σ-1)} y si
    α < 1/σ crece sin cota; en todos los casos Λ* → 0.

    Returns:
        LimitReport
    """
    if not 0.0 < alpha < 1.0:
        raise ConfigError("attention.alpha", "small-gamma limits need 0 < alpha < 1")
    if not sigma > 1.0:
        raise ConfigError("cost.sigma", "sigma must be > 1")
    gammas = _decreasing_gammas(gammas)
    probes = np.asarray(probes, dtype=float)
    quality, reads = _probe_optimum(alpha, sigma, gammas, probes)

    product = alpha * sigma
    if np.isclose(product, 1.0, rtol=1e-9, atol=0.0):
        regime, limit = "limit", alpha ** (1.0 / (sigma - 1.0))
        trend = bool(np.all(np.abs(reads[-1] - limit) <= LIMIT_ATOL))
    elif product > 1.0:
        regime, limit = "vanishing", 0.0
        trend = bool(np.all(np.diff(reads, axis=0) < 0))
    else:
        regime, limit = "exploding", np.inf
        trend = bool(np.all(np.diff(reads, axis=0) > 0))
    to_zero = bool(np.all(quality[-1] <= LIMIT_ATOL))
    if not (trend and to_zero):
        logger.error("small-gamma limit check failed (alpha=%g, sigma=%g, regime=%s)",
                     alpha, sigma, regime)
    return LimitReport(alpha=float(alpha), sigma=float(sigma), gammas=gammas, probes=probes,
                       quality=quality, engagement=reads, regime=regime, limit=float(limit),
                       trend_holds=trend, quality_to_zero=to_zero)


class FloorReport(NamedTuple):
    gammas: np.ndarray
    quality: np.ndarray
    engagement: np.ndarray
    floor: float
    holds: bool


def convex_quality_floor(alpha, sigma, gammas):
    """
    Atención convexa (α > 1): en φ̂ = 0 la calidad no baja de 1 - 1/α y
    el engagement sigue siendo positivo cuando γ → 0.
    """
    if not alpha > 1.0:
        raise ConfigError("attention.alpha", "the quality floor needs alpha > 1")
    gammas = _decreasing_gammas(gammas)
    quality, reads = _probe_optimum(alpha, sigma, gammas, np.zeros(1))
    floor = 1.0 - 1.0 / alpha
    holds = bool(np.all(quality[:, 0] >= floor - QUALITY_TOL) and np.all(reads[:, 0] > 0))
    if not holds:
        logger.error("convex quality floor violated (alpha=%g)", alpha)
    return FloorReport(gammas=gammas, quality=quality[:, 0], engagement=reads[:, 0],
                       floor=floor, holds=holds)
