#!/usr/bin/env python3
"""
Mecanismos de Referencia
========================
Planificador, certificado único (incluida la certificación perfecta
impuesta) y dos certificados con corte por cruce de valores virtuales
efectivos.

Autor: Proyecto Certificación
Fecha: 2026
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from .exceptions import DomainError
from .mechanism_solver import (
    MERGE_TOL,
    MONOTONE_TOL,
    MechanismSolution,
    assemble_solution,
    base_theta_grid,
    effective_virtual_values,
    graded_nodes,
    profit,
)
from .model_core import (
    attention_values,
    conjugate_surplus,
    cost,
    inverse_marginal_cost,
    virtual_value_inverse,
    virtual_value_range,
    virtual_values,
)
from .numerics import (
    golden_section_max,
    maximize_quality,
    merge_grid,
    piecewise_simpson,
    quality_search_grid,
)

logger = logging.getLogger(__name__)

TWO_CERT_COARSE_POINTS = 64
COORDINATE_SWEEPS = 20
JUMP_GAP = 1e-10
PLATEAU_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class SingleCertResult:
    lam: float
    mechanism: MechanismSolution
    profit: float


@dataclass(frozen=True, eq=False)
class TwoCertResult:
    lambda_low: float
    lambda_high: float
    theta_hat: float
    mechanism: MechanismSolution
    profit: float
    feasible: bool = True
    diagnostics: dict = field(default_factory=dict)


# ============================================================================
# PLANIFICADOR
# ============================================================================

def planner(cfg):
    """
    Benchmark del planificador: sin vistas a proveedores malos.

    Λ ≡ 1 y V_g ≡ c'^{-1}(1 - γ) para todos los tipos.
    """
    theta, breaks = merge_grid(base_theta_grid(cfg), cfg.dist.interior_nodes,
                               MERGE_TOL * cfg.dist.theta_max)
    views = np.full(theta.shape, inverse_marginal_cost(cfg.cost, 1.0 - cfg.gamma))
    return assemble_solution(cfg, theta, np.ones_like(theta), views, "planner",
                             breakpoints=breaks)


def planner_objective(sol, cfg):
    """Lecturas de contenido bueno menos los costes de la plataforma."""
    integrand = (sol.allocation - cfg.gamma * (sol.views_good + sol.views_bad)
                 - cost(cfg.cost, sol.views_good))
    return float(piecewise_simpson(sol.theta, integrand * sol.pdf, sol.breakpoints))


# ============================================================================
# CERTIFICADO ÚNICO
# ============================================================================

def serving_phi(cfg, lam):
    """φ donde R(φ, λ) = 0; R es afín en φ con pendiente A(λ)."""
    a = float(attention_values(cfg.attention, lam))
    if a <= 0:
        return np.inf
    return (cfg.gamma - (1.0 - lam) * a) / (lam * a)


def theta_at_phi(cfg, y):
    """Menor θ con φ(θ) >= y, o None si ningún tipo lo alcanza."""
    low, high = virtual_value_range(cfg.dist)
    if y <= low:
        return 0.0
    if y > high:
        return None
    return virtual_value_inverse(cfg.dist, y, tol=cfg.grid.refine_tol)


def _fixed_quality_mechanism(cfg, segments, label, extra_points=()):
    """
    Mecanismo con calidad constante por tramos de θ.

    ``segments`` es una lista [(θ_inicio, λ)]; los tipos θ >= θ_inicio
    reciben λ. En cada cambio de calidad se inserta también un nodo a su
    izquierda para integrar el salto.
    """
    theta_max = cfg.dist.theta_max
    extras = [*cfg.dist.interior_nodes, *extra_points]
    cuts = []
    for k, (start, lam) in enumerate(segments):
        end = segments[k + 1][0] if k + 1 < len(segments) else theta_max
        if k > 0:
            extras += [start - JUMP_GAP * theta_max, start]
        cut = theta_at_phi(cfg, serving_phi(cfg, lam))
        if cut is not None and start < cut < end:
            cuts.append(cut)
    theta, breaks = merge_grid(base_theta_grid(cfg), extras + cuts, MERGE_TOL * theta_max)
    theta, _ = merge_grid(theta, graded_nodes(cfg, cuts), MERGE_TOL * theta_max)

    quality = np.full(theta.shape, float(segments[0][1]))
    for start, lam in segments[1:]:
        quality[int(np.argmin(np.abs(theta - start))):] = lam
    value = effective_virtual_values(cfg.attention, cfg.gamma, virtual_values(cfg.dist, theta), quality)
    views = inverse_marginal_cost(cfg.cost, value)
    return assemble_solution(cfg, theta, quality, views, label, breakpoints=breaks)


def single_certificate(cfg, lam, extra_points=()):
    """
    Un único certificado de calidad λ para todos los tipos.

    Args:
        cfg (ModelConfig): Modelo
        lam (float): Calidad en (0, 1]

    Returns:
        SingleCertResult: vistas V = c'^{-1}(max(R(φ, λ), 0)) y beneficio
    """
    if not 0.0 < lam <= 1.0:
        raise DomainError(f"lambda must lie in (0, 1], got {lam!r}")
    label = "enforced_perfect" if lam == 1.0 else "single_certificate"
    mechanism = _fixed_quality_mechanism(cfg, [(0.0, float(lam))], label, extra_points)
    return SingleCertResult(lam=float(lam), mechanism=mechanism,
                            profit=profit(mechanism, cfg).virtual_surplus)


def enforced_perfect(cfg, extra_points=()):
    """Certificación perfecta impuesta: certificado único con λ = 1."""
    return single_certificate(cfg, 1.0, extra_points)


class SearchGrid(NamedTuple):
    """Malla de θ para las búsquedas de λ, sin nodos de corte."""

    theta: np.ndarray
    phi: np.ndarray
    pdf: np.ndarray
    breaks: np.ndarray


def _search_grid(cfg):
    theta, breaks = merge_grid(base_theta_grid(cfg), cfg.dist.interior_nodes,
                               MERGE_TOL * cfg.dist.theta_max)
    return SearchGrid(theta, virtual_values(cfg.dist, theta), cfg.dist.pdf(theta), breaks)


def _surplus_matrix(cfg, phi, lams):
    lams = np.asarray(lams, dtype=float)
    value = effective_virtual_values(cfg.attention, cfg.gamma, phi[:, None], lams[None, :])
    return conjugate_surplus(cfg.cost, value)


def single_profit_curve(cfg, lams, search=None, chunk=512):
    """Π^s(λ) para muchos λ en la malla de búsqueda (sin nodos de corte)."""
    search = search if search is not None else _search_grid(cfg)
    lams = np.asarray(lams, dtype=float)
    out = np.empty(lams.size)
    for start in range(0, lams.size, chunk):
        part = lams[start:start + chunk]
        surplus = _surplus_matrix(cfg, search.phi, part) * search.pdf[:, None]
        out[start:start + chunk] = piecewise_simpson(search.theta, surplus, search.breaks)
    return out


def optimize_single(cfg):
    """
    Certificado único óptimo: maximiza Π^s(λ) en (0, 1].

    Misma estrategia que para Λ*: malla gruesa, sección áurea y el mayor
    λ en empates.
    """
    search = _search_grid(cfg)

    def objective(lam, rows):
        return single_profit_curve(cfg, lam.ravel(), search=search).reshape(lam.shape)

    lam, _ = maximize_quality(objective, 1, cfg.grid.lambda_coarse_points, cfg.grid.refine_tol)
    result = single_certificate(cfg, float(lam[0]))
    logger.info("optimize_single: lambda*=%.10f profit=%.10g", result.lam, result.profit)
    return result


class DichotomyCheck(NamedTuple):
    lam: float
    profit_lam: float
    profit_perfect: float
    cutoff_lam: float
    cutoff_perfect: float
    profit_lower: bool
    more_diverse: bool

    @property
    def holds(self):
        return self.profit_lower or self.more_diverse


def single_certificate_dichotomy(cfg, lam):
    """
    Para λ < 1: o Π^s(λ) < Π^s(1), o el conjunto servido con λ contiene
    estrictamente al servido con λ = 1.
    """
    res_lam = single_certificate(cfg, lam)
    res_one = enforced_perfect(cfg)
    cut_lam = theta_at_phi(cfg, serving_phi(cfg, lam))
    cut_one = theta_at_phi(cfg, serving_phi(cfg, 1.0))
    theta_max = cfg.dist.theta_max
    cut_lam = theta_max if cut_lam is None else cut_lam
    cut_one = theta_max if cut_one is None else cut_one
    slack = 1e-9 * max(abs(res_one.profit), 1e-300)
    return DichotomyCheck(
        lam=float(lam),
        profit_lam=res_lam.profit,
        profit_perfect=res_one.profit,
        cutoff_lam=float(cut_lam),
        cutoff_perfect=float(cut_one),
        profit_lower=bool(res_lam.profit < res_one.profit + slack),
        more_diverse=bool(cut_lam < cut_one),
    )


# ============================================================================
# DOS CERTIFICADOS
# ============================================================================

def crossing_cutoff(cfg, lam_low, lam_high):
    """
    θ̂ = min{θ : R(φ(θ), λ̄) >= R(φ(θ), λ̲)}, o θ̄ si el conjunto es vacío.

    La diferencia R(φ, λ̄) - R(φ, λ̲) es afín en φ, así que el cruce se
    obtiene invirtiendo φ. En el empate gana el certificado alto.
    """
    spec, gamma = cfg.attention, cfg.gamma
    a_low = float(attention_values(spec, lam_low))
    a_high = float(attention_values(spec, lam_high))
    const_low = ((1.0 - lam_low) * a_low - gamma) / lam_low
    const_high = ((1.0 - lam_high) * a_high - gamma) / lam_high
    slope = a_high - a_low
    theta_max = cfg.dist.theta_max
    if slope <= 0:
        return 0.0 if const_high >= const_low else theta_max
    cut = theta_at_phi(cfg, (const_low - const_high) / slope)
    return theta_max if cut is None else cut


def two_certificate_profit(cfg, lam_low, lam_high, theta_hat):
    """
    Beneficio con dos certificados: λ̲ para θ < θ̂ y λ̄ para θ >= θ̂.

    θ̂ = θ̄ significa que el certificado alto no se usa. La monotonía de
    A(Λ)V_g se comprueba; si falla, el resultado se marca como no factible
    pero el beneficio se informa igualmente.

    Returns:
        TwoCertResult
    """
    if not 0.0 < lam_low <= lam_high <= 1.0:
        raise DomainError(f"need 0 < lambda_low <= lambda_high <= 1, got ({lam_low}, {lam_high})")
    theta_max = cfg.dist.theta_max
    if not 0.0 <= theta_hat <= theta_max:
        raise DomainError(f"theta_hat must lie in [0, {theta_max}], got {theta_hat}")
    if theta_hat >= theta_max:
        segments = [(0.0, float(lam_low))]
    elif theta_hat <= 0.0:
        segments = [(0.0, float(lam_high))]
    else:
        segments = [(0.0, float(lam_low)), (float(theta_hat), float(lam_high))]
    mechanism = _fixed_quality_mechanism(cfg, segments, "two_certificate")

    allocation = mechanism.allocation
    scale = max(1.0, float(np.max(np.abs(allocation))))
    steps = np.diff(allocation)
    feasible = bool(steps.size == 0 or np.min(steps) >= -MONOTONE_TOL * scale)
    if not feasible:
        logger.warning("two-certificate menu (%.6g, %.6g, theta_hat=%.6g) is not incentive compatible",
                       lam_low, lam_high, theta_hat)
    return TwoCertResult(
        lambda_low=float(lam_low),
        lambda_high=float(lam_high),
        theta_hat=float(theta_hat),
        mechanism=mechanism,
        profit=profit(mechanism, cfg).virtual_surplus,
        feasible=feasible,
    )


def _pair_profit(cfg, search, lows, highs):
    """Π^bin con el corte por cruce, para arrays de pares (λ̲, λ̄)."""
    low = _surplus_matrix(cfg, search.phi, lows)
    high = _surplus_matrix(cfg, search.phi, highs)
    return piecewise_simpson(search.theta, np.maximum(low, high) * search.pdf[:, None], search.breaks)


def _refine_coordinate(evaluate, current, current_value, lower, upper, grid, tol):
    idx = int(np.searchsorted(grid, current))
    lo = max(lower, grid[max(idx - 1, 0)])
    hi = min(upper, grid[min(idx + 1, grid.size - 1)])
    if not hi > lo:
        return current, current_value

    def objective(lam, rows):
        return evaluate(lam.ravel()).reshape(lam.shape)

    lam, val = golden_section_max(objective, np.array([lo]), np.array([hi]), np.arange(1), tol)
    if val[0] > current_value:
        return float(lam[0]), float(val[0])
    return current, current_value


def _coordinate_ascent(cfg, search, grid, low, high):
    tol = cfg.grid.refine_tol
    value = float(_pair_profit(cfg, search, [low], [high])[0])
    for _ in range(COORDINATE_SWEEPS):
        previous = value
        high, value = _refine_coordinate(
            lambda c: _pair_profit(cfg, search, np.full(c.size, low), c),
            high, value, low, 1.0, grid, tol)
        low, value = _refine_coordinate(
            lambda c: _pair_profit(cfg, search, c, np.full(c.size, high)),
            low, value, grid[0] * 1e-3, high, grid, tol)
        if value - previous <= 1e-14 * max(1.0, abs(value)):
            break
    return low, high, value


def optimize_two_certificate(cfg, coarse_points=TWO_CERT_COARSE_POINTS):
    """
    Menú óptimo de dos certificados.

    Búsqueda gruesa en una malla de pares λ̲ <= λ̄, ascenso por coordenadas
    con sección áurea y comparación con el óptimo de certificado único
    (un par degenerado es factible). θ̂ siempre sale de la regla de cruce.

    Returns:
        TwoCertResult: con el número de pares gruesos casi óptimos en
            diagnostics (el óptimo no tiene por qué ser único)
    """
    search = _search_grid(cfg)
    grid = quality_search_grid(coarse_points)
    surplus = _surplus_matrix(cfg, search.phi, grid) * search.pdf[:, None]

    values = np.full((grid.size, grid.size), -np.inf)
    for i in range(grid.size):
        pairs = np.maximum(surplus[:, i:i + 1], surplus[:, i:])
        values[i, i:] = piecewise_simpson(search.theta, pairs, search.breaks)
    flat_best = float(np.max(values))
    i, j = np.unravel_index(int(np.argmax(values)), values.shape)
    near = int(np.sum(values >= flat_best - PLATEAU_RTOL * max(abs(flat_best), 1e-300)))
    if near > 1:
        logger.info("two-certificate coarse search: %d near-optimal pairs", near)

    single = optimize_single(cfg)
    candidates = [
        _coordinate_ascent(cfg, search, grid, grid[i], grid[j]),
        _coordinate_ascent(cfg, search, grid, single.lam, single.lam),
    ]
    low, high, _ = max(candidates, key=lambda c: (c[2], c[1]))

    result = two_certificate_profit(cfg, low, high, crossing_cutoff(cfg, low, high))
    if result.profit < single.profit:
        result = two_certificate_profit(cfg, single.lam, single.lam,
                                        crossing_cutoff(cfg, single.lam, single.lam))
    diagnostics = {"near_optimal_coarse_pairs": near, "single_lambda": single.lam,
                   "single_profit": single.profit}
    logger.info("optimize_two_certificate: (%.8f, %.8f) theta_hat=%.8f profit=%.10g",
                result.lambda_low, result.lambda_high, result.theta_hat, result.profit)
    return replace(result, diagnostics=diagnostics)
