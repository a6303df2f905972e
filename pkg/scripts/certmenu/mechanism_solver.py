#!/usr/bin/env python3
"""
Mecanismo Óptimo
================
Valor virtual efectivo R, mecanismo óptimo sin restricciones (calidad
Λ* y vistas V*_g tipo a tipo), precios por la fórmula de la envolvente,
canonicalización de mecanismos agrupados y verificación de IC.

Autor: Proyecto Certificación
Fecha: 2026
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import pandas as pd

from .exceptions import (
    DomainError,
    InternalSolverError,
    PreconditionError,
    RegularityError,
)
from .model_core import (
    attention_deriv,
    attention_slope,
    attention_values,
    check_regularity,
    cost,
    inverse_marginal_cost,
    virtual_value_inverse,
    virtual_value_range,
    virtual_values,
)
from .numerics import (
    cumulative_piecewise_simpson,
    locate_threshold,
    maximize_quality,
    merge_grid,
    piecewise_simpson,
)

logger = logging.getLogger(__name__)

ROW_CHUNK = 2048
MERGE_TOL = 1e-12
MONOTONE_TOL = 1e-9
JUMP_MIN = 1e-3
JUMP_RATIO = 10.0
SERVED_TOL = 1e-12
POLISH_WIDTH = 1e-6
POLISH_STEPS = 60
GRADED_POINTS = 1000
GRADED_SPAN = 0.25

MECHANISM_COLUMNS = ["theta", "phi", "lambda", "v_good", "v_bad", "price",
                     "attention", "engagement_density"]


# ============================================================================
# TIPOS
# ============================================================================

def _frozen(values):
    arr = np.array(values, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MechanismSolution:
    """
    Mecanismo muestreado en una malla de θ.

    ``breakpoints`` son los nodos donde el integrando puede tener quiebres
    o saltos; la cuadratura se hace por tramos entre ellos.
    """

    theta: np.ndarray
    phi: np.ndarray
    quality: np.ndarray
    views_good: np.ndarray
    views_bad: np.ndarray
    price: np.ndarray
    attention: np.ndarray
    cdf: np.ndarray
    pdf: np.ndarray
    label: str
    breakpoints: tuple = ()
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        for name in ("theta", "phi", "quality", "views_good", "views_bad",
                     "price", "attention", "cdf", "pdf"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        n = self.theta.size
        if any(getattr(self, name).size != n for name in ("phi", "quality", "views_good",
                                                          "views_bad", "price", "attention")):
            raise ValueError("mechanism arrays must have equal length")
        if n > 1 and np.any(np.diff(self.theta) <= 0):
            raise ValueError("theta grid must be strictly increasing")

    @property
    def allocation(self):
        """A(Λ(θ))·V_g(θ): lecturas esperadas del contenido bueno."""
        return self.attention * self.views_good

    @property
    def utility(self):
        return self.theta * self.allocation - self.price

    def sample(self, theta, column="views_good"):
        """Interpolación lineal (monótona) de una columna en θ arbitrarios."""
        return np.interp(theta, self.theta, getattr(self, column))

    def to_frame(self):
        return pd.DataFrame({
            "theta": self.theta,
            "phi": self.phi,
            "lambda": self.quality,
            "v_good": self.views_good,
            "v_bad": self.views_bad,
            "price": self.price,
            "attention": self.attention,
            "engagement_density": self.allocation * self.pdf,
        }, columns=MECHANISM_COLUMNS)


class ProfitReport(NamedTuple):
    direct: float
    virtual_surplus: float

    @property
    def relative_gap(self):
        scale = max(abs(self.direct), abs(self.virtual_surplus))
        return 0.0 if scale == 0 else abs(self.direct - self.virtual_surplus) / scale


class ICReport(NamedTuple):
    max_violation: float
    at: tuple | None
    scale: float

    def holds(self, rel_tol=1e-8):
        return self.max_violation <= rel_tol * max(self.scale, 1e-300)


# ============================================================================
# VALOR VIRTUAL EFECTIVO
# ============================================================================

def effective_virtual_values(spec, gamma, phi, lam):
    """R(φ̂, λ) vectorizado, escrito como φ̂·A + ((1-λ)·A - γ)/λ."""
    a = attention_values(spec, lam)
    return phi * a + ((1.0 - lam) * a - gamma) / lam


def effective_virtual_value(phi_hat, lam, cfg):
    """
    Valor virtual efectivo R(φ̂, λ) = (φ̂ + (1-λ)/λ)·A(λ) - γ/λ.

    Args:
        phi_hat (float | array): Valor virtual
        lam (float | array): Calidad en (0, 1]
        cfg (ModelConfig): Modelo

    Returns:
        float | array: R; en λ = 1 vale φ̂ - γ

    Raises:
        DomainError: si λ <= 0 o λ > 1
    """
    arr = np.asarray(lam, dtype=float)
    if np.any(arr <= 0.0) or np.any(arr > 1.0):
        raise DomainError(f"lambda must lie in (0, 1], got {lam!r}")
    out = effective_virtual_values(cfg.attention, cfg.gamma, np.asarray(phi_hat, dtype=float), arr)
    return float(out) if np.ndim(out) == 0 else out


def foc_residual(phi_hat, lam, cfg):
    """A(λ) - λ²(φ̂ + (1-λ)/λ)A'(λ) - γ; cero en un óptimo interior."""
    a = attention_values(cfg.attention, lam)
    slope = attention_deriv(cfg.attention, lam)
    return float(a - lam * (phi_hat * lam + 1.0 - lam) * slope - cfg.gamma)


def _quality_objective(cfg, phi):
    spec, gamma = cfg.attention, cfg.gamma

    def objective(lam, rows):
        return effective_virtual_values(spec, gamma, phi[rows][:, None], lam)

    return objective


def _foc_values(spec, gamma, phi, lam):
    a = attention_values(spec, lam)
    return a - lam * (phi * lam + 1.0 - lam) * attention_slope(spec, lam) - gamma


def _polish_quality(cfg, phi, lam, value):
    """
    Afina los óptimos interiores resolviendo la FOC por bisección.

    La sección áurea solo resuelve λ hasta ~sqrt(eps) porque R es plana
    en el óptimo; la FOC cambia de signo con pendiente finita.
    """
    spec, gamma = cfg.attention, cfg.gamma
    inner = np.flatnonzero(lam < 1.0)
    if inner.size == 0:
        return lam, value
    p = phi[inner]
    lo = lam[inner] * (1.0 - POLISH_WIDTH)
    hi = np.minimum(lam[inner] * (1.0 + POLISH_WIDTH), 1.0)
    bracketed = (_foc_values(spec, gamma, p, lo) < 0) & (_foc_values(spec, gamma, p, hi) > 0)
    if not bracketed.any():
        return lam, value
    idx = inner[bracketed]
    p, lo, hi = p[bracketed], lo[bracketed], hi[bracketed]
    for _ in range(POLISH_STEPS):
        mid = 0.5 * (lo + hi)
        below = _foc_values(spec, gamma, p, mid) < 0
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    root = 0.5 * (lo + hi)
    at_root = effective_virtual_values(spec, gamma, p, root)
    keep = at_root >= value[idx] - 1e-13 * np.maximum(1.0, np.abs(value[idx]))
    lam, value = lam.copy(), value.copy()
    lam[idx[keep]] = root[keep]
    value[idx[keep]] = at_root[keep]
    return lam, value


def pointwise_optimum(phi, cfg):
    """
    (Λ*, V*_g, R*) para un array de valores virtuales.

    Cada fila se resuelve de forma independiente, así que el resultado no
    depende del tamaño de los bloques.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    quality = np.empty_like(phi)
    best = np.empty_like(phi)
    for start in range(0, phi.size, ROW_CHUNK):
        chunk = phi[start:start + ROW_CHUNK]
        lam, val = maximize_quality(_quality_objective(cfg, chunk), chunk.size,
                                    cfg.grid.lambda_coarse_points, cfg.grid.refine_tol)
        lam, val = _polish_quality(cfg, chunk, lam, val)
        quality[start:start + ROW_CHUNK] = lam
        best[start:start + ROW_CHUNK] = val
    views = inverse_marginal_cost(cfg.cost, best)
    return quality, np.asarray(views, dtype=float), best


def optimal_quality(phi_hat, cfg):
    """
    Mayor maximizador de R(φ̂, ·) en (0, 1].

    Malla gruesa de ``lambda_coarse_points`` puntos, refinamiento por
    sección áurea hasta ``refine_tol`` y desempate hacia el λ mayor.
    """
    quality, _, _ = pointwise_optimum([phi_hat], cfg)
    return float(quality[0])


def optimal_views(phi_hat, lam_star, cfg):
    """V*_g = c'^{-1}(max(R(φ̂, λ*), 0))."""
    return float(inverse_marginal_cost(cfg.cost, effective_virtual_value(phi_hat, lam_star, cfg)))


# ============================================================================
# ENSAMBLADO
# ============================================================================

def base_theta_grid(cfg):
    return np.linspace(0.0, cfg.dist.theta_max, int(cfg.grid.theta_points))


def expectation_weights(theta, pdf):
    """Pesos de trapecio por densidad: E[g] ≈ Σ w_i g(θ_i)."""
    theta = np.asarray(theta, dtype=float)
    cell = np.zeros_like(theta)
    if theta.size > 1:
        widths = np.diff(theta)
        cell[:-1] += widths / 2.0
        cell[1:] += widths / 2.0
    return cell * np.asarray(pdf, dtype=float)


def _envelope_prices(theta, allocation, breakpoints=()):
    # Each cell's rent increment stays within [a_k, a_{k+1}]·h_k so that
    # adjacent (and, with monotone a, all) discrete IC constraints hold.
    theta = np.asarray(theta, dtype=float)
    allocation = np.asarray(allocation, dtype=float)
    if theta.size < 2:
        return theta * allocation
    width = np.diff(theta)
    left, right = allocation[:-1] * width, allocation[1:] * width
    increments = np.clip(cumulative_piecewise_simpson(theta, allocation, breakpoints),
                         np.minimum(left, right), np.maximum(left, right))
    rent = np.concatenate(([0.0], np.cumsum(increments)))
    return theta * allocation - rent


def _monotone_slack(values):
    values = np.asarray(values, dtype=float)
    if values.size < 2:
        return 0.0
    return float(np.min(np.diff(values)))


def assemble_solution(cfg, theta, quality, views_good, label, breakpoints=(), diagnostics=None):
    """
    Completa un mecanismo a partir de (θ, Λ, V_g).

    V_b se fija por la ecuación de calidad y P por la envolvente con
    Simpson acumulado; si la asignación no es monótona los precios se calculan
    igualmente y la comprobación queda para el llamador.
    """
    theta = np.asarray(theta, dtype=float)
    quality = np.asarray(quality, dtype=float)
    views_good = np.asarray(views_good, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        views_bad = np.where(quality > 0, views_good * (1.0 - quality) / quality, 0.0)
    attention = attention_values(cfg.attention, quality)
    return MechanismSolution(
        theta=theta,
        phi=virtual_values(cfg.dist, theta),
        quality=quality,
        views_good=views_good,
        views_bad=views_bad,
        price=_envelope_prices(theta, attention * views_good, breakpoints),
        attention=attention,
        cdf=cfg.dist.cdf(theta),
        pdf=cfg.dist.pdf(theta),
        label=label,
        breakpoints=tuple(float(b) for b in breakpoints),
        diagnostics=dict(diagnostics or {}),
    )


def graded_nodes(cfg, cutoffs):
    """
    Nodos con espaciado cúbico a la derecha de cada umbral de servicio.

    Con σ > 2 las vistas crecen como (θ - θ_c)^(1/(σ-1)) y la malla
    uniforme deja un error O(h^(σ/(σ-1))) en los precios.
    """
    if cfg.cost.sigma <= 2.0:
        return []
    theta_max = cfg.dist.theta_max
    steps = (np.arange(1, GRADED_POINTS) / GRADED_POINTS) ** 3
    nodes = []
    for cut in cutoffs:
        if cut is None or not 0.0 <= cut < theta_max:
            continue
        span = min(GRADED_SPAN * theta_max, theta_max - cut)
        nodes.extend(cut + span * steps)
    return nodes


def _serving_cutoff(cfg, base, best, tol):
    served = np.flatnonzero(best > 0)
    if served.size == 0:
        return None
    i = served[0]
    if i == 0:
        return 0.0

    def is_served(t):
        return pointwise_optimum(virtual_values(cfg.dist, [t]), cfg)[2][0] > 0

    bracket = locate_threshold(is_served, base[i - 1], base[i], tol)
    return bracket.first_true


def _quality_threshold_points(cfg, base, lo_index, level, tol):
    def reaches(t):
        return pointwise_optimum(virtual_values(cfg.dist, [t]), cfg)[0][0] >= level

    bracket = locate_threshold(reaches, base[lo_index], base[lo_index + 1], tol)
    if bracket is None:
        return []
    return [p for p in bracket if p is not None]


def _full_quality_points(cfg, base, quality, tol):
    full = np.flatnonzero(quality >= 1.0)
    if full.size == 0 or full[0] == 0:
        return None, []
    i = full[0]
    points = _quality_threshold_points(cfg, base, i - 1, 1.0, tol)
    return (points[-1] if points else base[i]), points


def _quality_jump_points(cfg, base, quality, tol):
    steps = np.diff(quality)
    if steps.size < 1:
        return []
    padded = np.concatenate([[0.0], steps, [0.0]])
    neighbours = np.maximum(padded[:-2], padded[2:])
    jumps = np.flatnonzero((steps > JUMP_MIN) & (steps > JUMP_RATIO * neighbours))
    points = []
    for i in jumps:
        level = 0.5 * (quality[i] + quality[i + 1])
        points.extend(_quality_threshold_points(cfg, base, i, level, tol))
    return points


def _foc_residuals(cfg, phi, quality, views):
    spec = cfg.attention
    interior = (quality < 1.0) & (views > 0)
    for kink in spec.kinks:
        interior &= np.abs(quality - kink) > 1e-6
    if not interior.any():
        return 0.0
    lam = quality[interior]
    a = attention_values(spec, lam)
    slope = attention_slope(spec, lam)
    residual = a - lam * (phi[interior] * lam + 1.0 - lam) * slope - cfg.gamma
    return float(np.max(np.abs(residual)))


def solve_optimal(cfg, extra_points=(), strict=False):
    """
    Mecanismo óptimo sin restricciones.

    Resuelve Λ* y V*_g en la malla base de θ, localiza por bisección el
    umbral de servicio, el umbral de calidad perfecta y los saltos de Λ*,
    los inserta como nodos y vuelve a resolver en la malla final.

    Args:
        cfg (ModelConfig): Modelo validado
        extra_points (iterable): Nodos adicionales a insertar
        strict (bool): Si True, una violación de monotonía lanza error

    Returns:
        MechanismSolution: con diagnósticos de monotonía y de la FOC

    Raises:
        RegularityError: si la distribución no es regular
        InternalSolverError: solo con strict=True
    """
    report = check_regularity(cfg.dist, tol=cfg.grid.refine_tol)
    if not report.regular:
        raise RegularityError(report.violation_at)

    theta_max = cfg.dist.theta_max
    tol = cfg.grid.refine_tol * theta_max
    base = base_theta_grid(cfg)
    quality, views, best = pointwise_optimum(virtual_values(cfg.dist, base), cfg)

    serving = _serving_cutoff(cfg, base, best, tol)
    full_cutoff, full_points = _full_quality_points(cfg, base, quality, tol)
    jump_points = _quality_jump_points(cfg, base, quality, tol)
    extras = [serving, *full_points, *jump_points, *cfg.dist.interior_nodes, *extra_points]
    theta, breaks = merge_grid(base, extras, MERGE_TOL * theta_max)
    theta, _ = merge_grid(theta, graded_nodes(cfg, [serving]), MERGE_TOL * theta_max)

    phi = virtual_values(cfg.dist, theta)
    quality, views, best = pointwise_optimum(phi, cfg)

    alloc = attention_values(cfg.attention, quality) * views
    scale = max(1.0, float(np.max(np.abs(views))) if views.size else 1.0)
    diagnostics = {
        "serving_cutoff": serving,
        "full_quality_cutoff": full_cutoff if quality[-1] >= 1.0 else None,
        "quality_jumps": [float(p) for p in jump_points],
        "min_quality_step": _monotone_slack(quality),
        "min_views_step": _monotone_slack(views),
        "min_allocation_step": _monotone_slack(alloc),
        "max_foc_residual": _foc_residuals(cfg, phi, quality, views),
    }
    if full_cutoff is None and quality[0] >= 1.0:
        diagnostics["full_quality_cutoff"] = 0.0
    broken = (diagnostics["min_quality_step"] < -MONOTONE_TOL
              or diagnostics["min_views_step"] < -MONOTONE_TOL * scale
              or diagnostics["min_allocation_step"] < -MONOTONE_TOL * scale)
    diagnostics["internal_error"] = bool(broken)
    if broken:
        message = (f"optimal mechanism is not monotone (quality step "
                   f"{diagnostics['min_quality_step']:.3e}, views step "
                   f"{diagnostics['min_views_step']:.3e})")
        logger.error(message)
        if strict:
            raise InternalSolverError(message)

    logger.debug("solve_optimal: %d nodos, corte de servicio %s", theta.size, serving)
    return assemble_solution(cfg, theta, quality, views, "optimal",
                             breakpoints=breaks, diagnostics=diagnostics)


def closed_form_linear(cfg, extra_points=()):
    """
    Solución cerrada para atención lineal A(λ) = λ.

    Λ = sqrt(γ/(1-φ)) si φ <= 1-γ y 1 en otro caso;
    V_g = c'^{-1}(φΛ + 1 - Λ - γ/Λ) si φ >= 1 - 1/(4γ) y 0 en otro caso.

    Raises:
        PreconditionError: si la atención no es potencia con alpha = 1 sin
            transformaciones
    """
    spec = cfg.attention
    if spec.alpha != 1.0 or spec.transformed:
        raise PreconditionError("closed_form_linear needs power attention with alpha=1 and no transforms")
    gamma = cfg.gamma
    phi_low, phi_high = virtual_value_range(cfg.dist)

    serving_phi = 1.0 - 1.0 / (4.0 * gamma) if gamma <= 0.5 else gamma
    cutoffs = [virtual_value_inverse(cfg.dist, y, tol=cfg.grid.refine_tol)
               for y in (serving_phi, 1.0 - gamma) if phi_low < y < phi_high]
    extras = [*cutoffs, *cfg.dist.interior_nodes, *extra_points]
    theta, breaks = merge_grid(base_theta_grid(cfg), extras, MERGE_TOL * cfg.dist.theta_max)

    phi = virtual_values(cfg.dist, theta)
    with np.errstate(divide="ignore", invalid="ignore"):
        quality = np.where(phi <= 1.0 - gamma, np.sqrt(gamma / (1.0 - phi)), 1.0)
    quality = np.minimum(quality, 1.0)
    value = phi * quality + 1.0 - quality - gamma / quality
    views = np.where(phi >= 1.0 - 1.0 / (4.0 * gamma),
                     inverse_marginal_cost(cfg.cost, value), 0.0)
    return assemble_solution(cfg, theta, quality, views, "closed_form_linear",
                             breakpoints=breaks)


# ============================================================================
# PRECIOS, BENEFICIO E INCENTIVOS
# ============================================================================

def price_schedule(sol, cfg=None, check=True):
    """
    Precios de la envolvente: P(θ) = θ·a(θ) - ∫₀^θ a, con a = A(Λ)V_g.

    La integral es Simpson acumulado por tramos entre quiebres, con cada
    incremento acotado por [a_k, a_{k+1}]·h_k; con a monótona las
    restricciones de IC se cumplen exactamente entre nodos.

    Raises:
        PreconditionError: si la asignación no es no decreciente
    """
    allocation = sol.allocation
    if check:
        scale = max(1.0, float(np.max(np.abs(allocation))) if allocation.size else 1.0)
        if _monotone_slack(allocation) < -MONOTONE_TOL * scale:
            raise PreconditionError("allocation A(Lambda)*V_g must be nondecreasing for envelope prices")
    return _envelope_prices(sol.theta, allocation, sol.breakpoints)


def verify_ic(sol, cfg=None, chunk=256):
    """
    Máxima ganancia de desviarse (reportar θ' o no participar).

    Args:
        sol (MechanismSolution): Mecanismo con precios
        chunk (int): Filas de la matriz de pares que se evalúan a la vez

    Returns:
        ICReport: violación máxima (> 0 rompe IC/IR), el par (θ, θ')
            donde ocurre (θ' = None es no participar) y la escala θ̄·max a
    """
    theta = sol.theta
    allocation = sol.allocation
    price = sol.price
    truthful = theta * allocation - price
    worst, where = 0.0, None
    for start in range(0, theta.size, chunk):
        rows = slice(start, start + chunk)
        deviation = theta[rows, None] * allocation[None, :] - price[None, :]
        best_j = np.argmax(deviation, axis=1)
        best_dev = deviation[np.arange(best_j.size), best_j]
        gain_report = best_dev - truthful[rows]
        gain_exit = -truthful[rows]
        gain = np.maximum(gain_report, gain_exit)
        k = int(np.argmax(gain))
        if gain[k] > worst:
            worst = float(gain[k])
            other = theta[best_j[k]] if gain_report[k] >= gain_exit[k] else None
            where = (float(theta[start + k]), None if other is None else float(other))
    scale = float(theta[-1] * np.max(np.abs(allocation))) if theta.size else 0.0
    return ICReport(max_violation=worst, at=where, scale=scale)


def _profit_integrands(sol, cfg):
    views_total = sol.views_good + sol.views_bad
    common = (sol.attention * sol.views_bad - cfg.gamma * views_total
              - cost(cfg.cost, sol.views_good))
    direct = sol.price + common
    virtual = sol.phi * sol.allocation + common
    return direct, virtual


def profit(sol, cfg):
    """
    Beneficio de la plataforma en forma directa y en forma de excedente
    virtual, ambos por Simpson a tramos ponderando por f.

    Returns:
        ProfitReport: (direct, virtual_surplus)
    """
    direct, virtual = _profit_integrands(sol, cfg)
    return ProfitReport(
        direct=float(piecewise_simpson(sol.theta, direct * sol.pdf, sol.breakpoints)),
        virtual_surplus=float(piecewise_simpson(sol.theta, virtual * sol.pdf, sol.breakpoints)),
    )


# ============================================================================
# CANONICALIZACIÓN
# ============================================================================

@dataclass(frozen=True, eq=False)
class PooledMechanism:
    """
    Mecanismo con mensajes compartidos por varios tipos.

    ``message[i]`` es el certificado asignado al tipo θ_i. La calidad de
    un mensaje es E[V_g | m] / E[V_g + V_b | m] con los pesos de
    expectation_weights.
    """

    cfg: object
    theta: np.ndarray
    message: np.ndarray
    views_good: np.ndarray
    views_bad: np.ndarray
    price: np.ndarray

    def __post_init__(self):
        for name in ("theta", "views_good", "views_bad", "price"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "message", np.asarray(self.message))

    @property
    def weights(self):
        return expectation_weights(self.theta, self.cfg.dist.pdf(self.theta))

    def message_quality(self):
        """Calidad Λ(m) de cada mensaje; 1 si el mensaje no recibe vistas."""
        w = self.weights
        qualities = {}
        for m in np.unique(self.message):
            mask = self.message == m
            good = float(np.sum(w[mask] * self.views_good[mask]))
            total = good + float(np.sum(w[mask] * self.views_bad[mask]))
            qualities[m.item() if hasattr(m, "item") else m] = good / total if total > 0 else 1.0
        return qualities

    def type_quality(self):
        qualities = self.message_quality()
        return np.array([qualities[m.item() if hasattr(m, "item") else m] for m in self.message])


def weighted_profit(cfg, theta, quality, views_good, views_bad, price):
    """Beneficio con los pesos discretos de expectation_weights."""
    w = expectation_weights(theta, cfg.dist.pdf(theta))
    a = attention_values(cfg.attention, quality)
    per_type = (price + a * views_bad - cfg.gamma * (views_good + views_bad)
                - cost(cfg.cost, views_good))
    return float(np.sum(w * per_type))


def canonicalize(pooled):
    """
    Certificado propio para cada tipo, conservando beneficio y utilidades.

    Cada tipo mantiene la calidad de su mensaje, Λ(M(θ)), y recibe
    Ṽ_b = V_g·(1 - Λ)/Λ vistas malas; los precios no cambian.

    Args:
        pooled (PooledMechanism): Mecanismo con mensajes agrupados

    Returns:
        MechanismSolution: con el beneficio antes y después en diagnostics
    """
    cfg = pooled.cfg
    quality = pooled.type_quality()
    views_good = pooled.views_good
    with np.errstate(divide="ignore", invalid="ignore"):
        views_bad = np.where(quality > 0, views_good * (1.0 - quality) / quality, 0.0)
    attention = attention_values(cfg.attention, quality)
    before = weighted_profit(cfg, pooled.theta, quality, views_good, pooled.views_bad, pooled.price)
    after = weighted_profit(cfg, pooled.theta, quality, views_good, views_bad, pooled.price)
    if abs(before - after) > 1e-10 * max(1.0, abs(before)):
        logger.error("canonicalize changed profit: %.12g -> %.12g", before, after)
    return MechanismSolution(
        theta=pooled.theta,
        phi=virtual_values(cfg.dist, pooled.theta),
        quality=quality,
        views_good=views_good,
        views_bad=views_bad,
        price=pooled.price,
        attention=attention,
        cdf=cfg.dist.cdf(pooled.theta),
        pdf=cfg.dist.pdf(pooled.theta),
        label="canonical",
        diagnostics={"profit_pooled": before, "profit_canonical": after},
    )
