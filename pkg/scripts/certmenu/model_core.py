#!/usr/bin/env python3
"""
Primitivas del Modelo
=====================
Funciones de atención, costes de targeting, distribuciones de tipos de
proveedores buenos y valores virtuales. Todo es inmutable y puro: los
objetos se pueden compartir entre hilos y procesos sin copiarlos.

Autor: Proyecto Certificación
Fecha: 2026
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .exceptions import (
    ConfigError,
    DomainError,
    KinkError,
    RangeError,
    RegularityError,
)

logger = logging.getLogger(__name__)

KINK_ATOL = 1e-12
DOMAIN_SLACK = 1e-12


def _as_output(values, like):
    """Devuelve float si la entrada era escalar, array en otro caso."""
    if np.ndim(like) == 0:
        return float(values)
    return values


# ============================================================================
# FUNCIÓN DE ATENCIÓN
# ============================================================================

@dataclass(frozen=True)
class AttentionSpec:
    """
    Función de atención A sobre [0, 1].

    La familia base es potencia, A(λ) = λ^alpha. Opcionalmente se aplica
    una transformación de pérdidas (loss_b) o de adicción (addiction_z);
    ambas son excluyentes.
    """

    alpha: float = 1.0
    loss_b: float = 0.0
    addiction_z: float = 0.0
    family: str = "power"

    def __post_init__(self):
        if self.family != "power":
            raise ConfigError("attention.family", f"unknown family {self.family!r}, expected 'power'")
        if not self.alpha > 0:
            raise ConfigError("attention.alpha", "alpha must be positive")
        if self.loss_b < 0:
            raise ConfigError("attention.loss_b", "loss_b must be nonnegative")
        if self.addiction_z < 0:
            raise ConfigError("attention.addiction_z", "addiction_z must be nonnegative")
        if self.loss_b > 0 and self.addiction_z > 0:
            raise ConfigError("attention.addiction_z", "loss_b and addiction_z are mutually exclusive")
        if self.addiction_z >= 1:
            raise ConfigError("attention.addiction_z", "addiction_z must be < 1")

    @property
    def transformed(self):
        return self.loss_b > 0 or self.addiction_z > 0

    @property
    def kinks(self):
        """Puntos donde A transformada no es diferenciable."""
        if self.loss_b > 0:
            return (self.loss_b / (1.0 + self.loss_b),)
        if self.addiction_z > 0:
            return (1.0 - self.addiction_z,)
        return ()

    def base(self, x):
        return np.power(x, self.alpha)

    def base_slope(self, x):
        with np.errstate(divide="ignore"):
            return self.alpha * np.power(x, self.alpha - 1.0)


def attention_values(spec, lam):
    """A(λ) vectorizada y sin validación de dominio (uso interno)."""
    lam = np.asarray(lam, dtype=float)
    if spec.loss_b > 0:
        inner = np.maximum(1.0 - (1.0 - lam) * (1.0 + spec.loss_b), 0.0)
    elif spec.addiction_z > 0:
        inner = np.minimum(lam + spec.addiction_z, 1.0)
    else:
        inner = lam
    return spec.base(inner)


def attention_slope(spec, lam):
    """
    A'(λ) vectorizada, sin comprobar quiebres.

    En el quiebre de pérdidas se usa la rama derecha y en el de adicción
    la izquierda; fuera de los quiebres coincide con attention_deriv.
    """
    lam = np.asarray(lam, dtype=float)
    if spec.loss_b > 0:
        b = spec.loss_b
        inner = np.maximum(1.0 - (1.0 - lam) * (1.0 + b), 0.0)
        return np.where(lam < b / (1.0 + b), 0.0, (1.0 + b) * spec.base_slope(inner))
    if spec.addiction_z > 0:
        z = spec.addiction_z
        return np.where(lam > 1.0 - z, 0.0, spec.base_slope(np.minimum(lam + z, 1.0)))
    return spec.base_slope(lam)


def _check_unit_interval(lam):
    arr = np.asarray(lam, dtype=float)
    if np.any(np.isnan(arr)) or np.any(arr < 0.0) or np.any(arr > 1.0):
        raise DomainError(f"lambda must lie in [0, 1], got {lam!r}")
    return arr


def attention_eval(spec, lam):
    """
    Evalúa la función de atención con la transformación configurada.

    Args:
        spec (AttentionSpec): Función de atención
        lam (float | array): Calidad del certificado en [0, 1]

    Returns:
        float | array: A(λ) en [0, 1]
    """
    arr = _check_unit_interval(lam)
    return _as_output(attention_values(spec, arr), lam)


def attention_deriv(spec, lam):
    """
    Derivada dA/dλ, con regla de la cadena a través de la transformación.

    Args:
        spec (AttentionSpec): Función de atención
        lam (float | array): Punto(s) de evaluación en [0, 1]

    Returns:
        float | array: A'(λ)

    Raises:
        KinkError: si algún punto cae en el quiebre de A_b o A_z; el error
            lleva las derivadas laterales.
    """
    arr = _check_unit_interval(lam)
    for kink in spec.kinks:
        hits = np.isclose(arr, kink, rtol=0.0, atol=KINK_ATOL)
        if np.any(hits):
            if spec.loss_b > 0:
                left = 0.0
                right = float((1.0 + spec.loss_b) * spec.base_slope(0.0))
            else:
                left = float(spec.base_slope(1.0))
                right = 0.0
            raise KinkError(kink, left, right)
    return _as_output(attention_slope(spec, arr), lam)


# ============================================================================
# COSTES DE TARGETING
# ============================================================================

@dataclass(frozen=True)
class CostSpec:
    """Coste c(v) = kappa·v^sigma/sigma de las vistas dirigidas."""

    kappa: float = 1.0
    sigma: float = 2.0

    def __post_init__(self):
        if not self.kappa > 0:
            raise ConfigError("cost.kappa", "kappa must be positive")
        if not self.sigma > 1:
            raise ConfigError("cost.sigma", "sigma must be > 1")


def cost(spec, v):
    v = np.asarray(v, dtype=float)
    return spec.kappa * np.power(v, spec.sigma) / spec.sigma


def marginal_cost(spec, v):
    """
    Coste marginal c'(v) = kappa·v^(sigma-1).

    Raises:
        DomainError: si v < 0
    """
    arr = np.asarray(v, dtype=float)
    if np.any(arr < 0):
        raise DomainError(f"views must be nonnegative, got {v!r}")
    return _as_output(spec.kappa * np.power(arr, spec.sigma - 1.0), v)


def inverse_marginal_cost(spec, x):
    """
    Inversa del coste marginal, con recorte en cero.

    Args:
        spec (CostSpec): Coste de targeting
        x (float | array): Retorno marginal por vista (puede ser negativo)

    Returns:
        float | array: (max(x, 0)/kappa)^(1/(sigma-1))
    """
    arr = np.maximum(np.asarray(x, dtype=float), 0.0)
    return _as_output(np.power(arr / spec.kappa, 1.0 / (spec.sigma - 1.0)), x)


def conjugate_surplus(spec, x):
    """max_v (x·v - c(v)); vale cero para x <= 0."""
    arr = np.maximum(np.asarray(x, dtype=float), 0.0)
    views = np.power(arr / spec.kappa, 1.0 / (spec.sigma - 1.0))
    return _as_output((1.0 - 1.0 / spec.sigma) * arr * views, x)


# ============================================================================
# DISTRIBUCIÓN DE TIPOS
# ============================================================================

@dataclass(frozen=True)
class TypeDistribution:
    """
    Distribución F de valores θ de los proveedores buenos en [0, θ̄].

    ``uniform`` usa F(θ) = θ/θ̄. ``tabulated`` interpola F linealmente
    entre nodos, de modo que la densidad es constante por tramos; en un
    nodo se usa la densidad del tramo de la derecha.
    """

    family: str = "uniform"
    theta_max: float = 1.0
    nodes: tuple = ()
    cdf_nodes: tuple = ()

    @classmethod
    def uniform(cls, theta_max=1.0):
        return cls(family="uniform", theta_max=float(theta_max))

    @classmethod
    def tabulated(cls, theta, cdf):
        theta = tuple(float(t) for t in theta)
        cdf = tuple(float(c) for c in cdf)
        if not theta:
            raise ConfigError("dist.theta", "tabulated distribution needs nodes")
        return cls(family="tabulated", theta_max=theta[-1], nodes=theta, cdf_nodes=cdf)

    def __post_init__(self):
        if self.family not in ("uniform", "tabulated"):
            raise ConfigError("dist.family", f"unknown family {self.family!r}")
        if not self.theta_max > 0:
            raise ConfigError("dist.theta_max", "theta_max must be positive")
        if self.family == "tabulated":
            theta = np.asarray(self.nodes, dtype=float)
            cdf = np.asarray(self.cdf_nodes, dtype=float)
            if theta.size < 2 or theta.size != cdf.size:
                raise ConfigError("dist.cdf", "theta and cdf need the same length (>= 2)")
            if theta[0] != 0.0 or np.any(np.diff(theta) <= 0):
                raise ConfigError("dist.theta", "nodes must start at 0 and be strictly increasing")
            if cdf[0] != 0.0 or cdf[-1] != 1.0:
                raise ConfigError("dist.cdf", "cdf must go from 0 to 1")
            if np.any(np.diff(cdf) <= 0):
                raise ConfigError("dist.cdf", "cdf must be strictly increasing (density > 0)")

    @property
    def interior_nodes(self):
        if self.family == "tabulated":
            return tuple(self.nodes[1:-1])
        return ()

    def cdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.family == "uniform":
            return np.clip(theta / self.theta_max, 0.0, 1.0)
        return np.interp(theta, self.nodes, self.cdf_nodes)

    def pdf(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.family == "uniform":
            return np.full(theta.shape, 1.0 / self.theta_max)
        nodes = np.asarray(self.nodes)
        slopes = np.diff(self.cdf_nodes) / np.diff(nodes)
        idx = np.clip(np.searchsorted(nodes, theta, side="right") - 1, 0, nodes.size - 2)
        return slopes[idx]


def virtual_values(dist, theta):
    """φ(θ) vectorizado y sin validación de dominio (uso interno)."""
    theta = np.asarray(theta, dtype=float)
    if dist.family == "uniform":
        return 2.0 * theta - dist.theta_max
    return theta - (1.0 - dist.cdf(theta)) / dist.pdf(theta)


def virtual_value(dist, theta):
    """
    Valor virtual φ(θ) = θ - (1 - F(θ))/f(θ).

    Args:
        dist (TypeDistribution): Distribución de tipos
        theta (float | array): Valor(es) en [0, θ̄]

    Returns:
        float | array: φ(θ); para la uniforme es exactamente 2θ - θ̄
    """
    arr = np.asarray(theta, dtype=float)
    slack = DOMAIN_SLACK * dist.theta_max
    if np.any(np.isnan(arr)) or np.any(arr < -slack) or np.any(arr > dist.theta_max + slack):
        raise DomainError(f"theta must lie in [0, {dist.theta_max}], got {theta!r}")
    arr = np.clip(arr, 0.0, dist.theta_max)
    return _as_output(virtual_values(dist, arr), theta)


def virtual_value_range(dist):
    """(φ(0), φ(θ̄))."""
    return float(virtual_values(dist, 0.0)), float(virtual_values(dist, dist.theta_max))


def virtual_value_inverse(dist, y, tol=1e-10):
    """
    Inversa de φ por bisección.

    Para la uniforme se usa la inversa exacta (y + θ̄)/2. Para una
    tabulada con saltos de densidad devuelve el menor θ con φ(θ) >= y.

    Args:
        dist (TypeDistribution): Distribución regular
        y (float): Valor virtual en [φ(0), φ(θ̄)]
        tol (float): Tolerancia en θ

    Returns:
        float: θ tal que φ(θ) ≈ y

    Raises:
        RangeError: si y cae fuera de [φ(0), φ(θ̄)]
    """
    low, high = virtual_value_range(dist)
    slack = DOMAIN_SLACK * max(1.0, abs(low), abs(high))
    if not (low - slack <= y <= high + slack):
        raise RangeError(f"y={y!r} outside virtual value range [{low:.6g}, {high:.6g}]")
    if dist.family == "uniform":
        return float(np.clip((y + dist.theta_max) / 2.0, 0.0, dist.theta_max))
    if y <= low:
        return 0.0
    if y >= high:
        return float(dist.theta_max)
    return float(optimize.bisect(lambda t: float(virtual_values(dist, t)) - y,
                                 0.0, dist.theta_max, xtol=tol))


@dataclass(frozen=True)
class RegularityReport:
    regular: bool
    violation_at: float | None = None


def check_regularity(dist, n_check=1001, tol=1e-10):
    """
    Comprueba que φ sea estrictamente creciente en una malla.

    La malla incluye los nodos de una tabulada y un punto justo a su
    izquierda, para detectar saltos hacia abajo de φ.

    Args:
        dist (TypeDistribution): Distribución a comprobar
        n_check (int): Puntos de la malla uniforme (>= 2)
        tol (float): Caída máxima tolerada entre puntos consecutivos

    Returns:
        RegularityReport: regular y el primer θ donde falla
    """
    if n_check < 2:
        raise DomainError("n_check must be >= 2")
    theta = np.linspace(0.0, dist.theta_max, int(n_check))
    nodes = np.asarray(dist.interior_nodes, dtype=float)
    if nodes.size:
        left = nodes - 1e-9 * dist.theta_max
        theta = np.unique(np.concatenate([theta, nodes, left]))
    phi = virtual_values(dist, theta)
    bad = np.flatnonzero(np.diff(phi) <= -tol)
    if bad.size:
        return RegularityReport(regular=False, violation_at=float(theta[bad[0] + 1]))
    return RegularityReport(regular=True)


# ============================================================================
# CONFIGURACIÓN DEL MODELO
# ============================================================================

@dataclass(frozen=True)
class GridConfig:
    theta_points: int = 2001
    lambda_coarse_points: int = 256
    refine_tol: float = 1e-10

    def __post_init__(self):
        if int(self.theta_points) < 2:
            raise ConfigError("grid.theta_points", "theta_points must be >= 2")
        if int(self.lambda_coarse_points) < 32:
            raise ConfigError("grid.lambda_coarse_points", "lambda_coarse_points must be >= 32")
        if not self.refine_tol > 0:
            raise ConfigError("grid.refine_tol", "refine_tol must be positive")


@dataclass(frozen=True)
class ModelConfig:
    """Parámetros completos del modelo; se validan al construirse."""

    attention: AttentionSpec
    cost: CostSpec
    dist: TypeDistribution
    gamma: float
    grid: GridConfig = field(default_factory=GridConfig)

    def __post_init__(self):
        validate_config(self)


def validate_config(cfg):
    """
    Valida las restricciones conjuntas del modelo.

    Raises:
        ConfigError: con la clave responsable en el mensaje
        RegularityError: si φ no es estrictamente creciente
    """
    upper = min(cfg.dist.theta_max, 1.0)
    if not cfg.gamma > 0:
        raise ConfigError("model.gamma", "gamma must be positive")
    if not cfg.gamma < upper:
        raise ConfigError("model.gamma", "gamma must be < min(theta_max, 1)")
    z = cfg.attention.addiction_z
    if z > 0:
        a_z = float(cfg.attention.base(z))
        if not a_z < cfg.gamma:
            raise ConfigError("attention.addiction_z",
                              f"A(z)={a_z:.6g} must be < gamma={cfg.gamma:.6g}")
    report = check_regularity(cfg.dist, tol=cfg.grid.refine_tol)
    if not report.regular:
        raise RegularityError(report.violation_at)
    return cfg
