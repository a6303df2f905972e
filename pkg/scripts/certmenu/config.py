#!/usr/bin/env python3
"""
Configuración
=============
Lectura de ficheros YAML con claves con puntos (``model.gamma``) o
bloques anidados equivalentes, valores por defecto y validación.

Autor: Proyecto Certificación
Fecha: 2026
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from pathlib import Path

import yaml

from .exceptions import ConfigError
from .model_core import AttentionSpec, CostSpec, GridConfig, ModelConfig, TypeDistribution

logger = logging.getLogger(__name__)

# ============================================================================
# ESQUEMA
# ============================================================================

DEFAULTS = {
    "attention.family": "power",
    "attention.loss_b": 0.0,
    "attention.addiction_z": 0.0,
    "cost.kappa": 1.0,
    "cost.sigma": 2.0,
    "dist.family": "uniform",
    "dist.theta_max": None,
    "dist.theta": None,
    "dist.cdf": None,
    "grid.theta_points": 2001,
    "grid.lambda_coarse_points": 256,
    "grid.refine_tol": 1e-10,
    "output.dir": "results/tables",
    "output.format": "csv",
    "output.precision": 12,
    "seed": 0,
    "run.n_jobs": 1,
    "oracle.probes": 200,
}

REQUIRED = ("model.gamma", "attention.alpha")

KNOWN_KEYS = frozenset(DEFAULTS) | frozenset(REQUIRED)

FLOAT_KEYS = ("model.gamma", "attention.alpha", "attention.loss_b", "attention.addiction_z",
              "cost.kappa", "cost.sigma", "dist.theta_max", "grid.refine_tol")
INT_KEYS = ("grid.theta_points", "grid.lambda_coarse_points", "output.precision", "seed",
            "run.n_jobs", "oracle.probes")


@dataclass(frozen=True)
class RunConfig:
    """Modelo validado más las opciones de salida y ejecución."""

    model: ModelConfig
    output_dir: Path
    output_format: str = "csv"
    precision: int = 12
    seed: int = 0
    n_jobs: int = 1
    oracle_probes: int = 200
    source: Path | None = None

    def summary(self):
        """Diccionario serializable con los parámetros efectivos."""
        cfg = self.model
        return {
            "model.gamma": cfg.gamma,
            "attention.family": cfg.attention.family,
            "attention.alpha": cfg.attention.alpha,
            "attention.loss_b": cfg.attention.loss_b,
            "attention.addiction_z": cfg.attention.addiction_z,
            "cost.kappa": cfg.cost.kappa,
            "cost.sigma": cfg.cost.sigma,
            "dist.family": cfg.dist.family,
            "dist.theta_max": cfg.dist.theta_max,
            "grid.theta_points": cfg.grid.theta_points,
            "grid.lambda_coarse_points": cfg.grid.lambda_coarse_points,
            "grid.refine_tol": cfg.grid.refine_tol,
            "output.precision": self.precision,
            "seed": self.seed,
        }


# ============================================================================
# LECTURA
# ============================================================================

def flatten(mapping, prefix=""):
    """{'model': {'gamma': 0.25}} -> {'model.gamma': 0.25}; las listas son hojas."""
    flat = {}
    for key, value in mapping.items():
        name = f"{prefix}{key}"
        items = flatten(value, prefix=f"{name}.") if isinstance(value, dict) else {name: value}
        for leaf, leaf_value in items.items():
            if leaf in flat:
                raise ConfigError(leaf, "duplicated key")
            flat[leaf] = leaf_value
    return flat


def _coerce(flat, key, kind):
    value = flat.get(key)
    if value is None:
        return
    try:
        if kind is int:
            number = float(value)
            if number != int(number):
                raise ValueError
            flat[key] = int(number)
        else:
            flat[key] = float(value)
    except (TypeError, ValueError):
        raise ConfigError(key, f"expected a {kind.__name__}, got {value!r}") from None


def _distribution(flat):
    family = flat["dist.family"]
    if family == "tabulated":
        if flat["dist.theta"] is None or flat["dist.cdf"] is None:
            raise ConfigError("dist.theta", "tabulated distribution needs dist.theta and dist.cdf")
        try:
            dist = TypeDistribution.tabulated(flat["dist.theta"], flat["dist.cdf"])
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError("dist.theta", f"nodes must be numbers ({exc})") from None
        given = flat["dist.theta_max"]
        if given is not None and abs(given - dist.theta_max) > 1e-12:
            raise ConfigError("dist.theta_max", "must equal the last tabulated node")
        return dist
    if flat["dist.theta"] is not None or flat["dist.cdf"] is not None:
        raise ConfigError("dist.theta", f"nodes are only allowed for dist.family=tabulated, got {family!r}")
    theta_max = 1.0 if flat["dist.theta_max"] is None else flat["dist.theta_max"]
    return TypeDistribution(family=family, theta_max=theta_max)


def config_from_mapping(raw, source=None):
    """
    Construye y valida un RunConfig a partir de un diccionario.

    Raises:
        ConfigError: clave desconocida, ausente o con valor inválido; el
            mensaje empieza por la clave
    """
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be a mapping")
    flat = flatten(raw)
    unknown = sorted(set(flat) - KNOWN_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown key")
    for key in REQUIRED:
        if flat.get(key) is None:
            raise ConfigError(key, "missing required key")
    flat = {**DEFAULTS, **flat}
    for key in FLOAT_KEYS:
        _coerce(flat, key, float)
    for key in INT_KEYS:
        _coerce(flat, key, int)

    if flat["output.format"] != "csv":
        raise ConfigError("output.format", f"only 'csv' is supported, got {flat['output.format']!r}")
    if not 0 <= flat["output.precision"] <= 17:
        raise ConfigError("output.precision", "precision must lie in [0, 17]")
    if flat["run.n_jobs"] < 1:
        raise ConfigError("run.n_jobs", "n_jobs must be >= 1")
    if flat["oracle.probes"] < 1:
        raise ConfigError("oracle.probes", "probes must be >= 1")

    model = ModelConfig(
        attention=AttentionSpec(alpha=flat["attention.alpha"], loss_b=flat["attention.loss_b"],
                                addiction_z=flat["attention.addiction_z"],
                                family=flat["attention.family"]),
        cost=CostSpec(kappa=flat["cost.kappa"], sigma=flat["cost.sigma"]),
        dist=_distribution(flat),
        gamma=flat["model.gamma"],
        grid=GridConfig(theta_points=flat["grid.theta_points"],
                        lambda_coarse_points=flat["grid.lambda_coarse_points"],
                        refine_tol=flat["grid.refine_tol"]),
    )
    return RunConfig(
        model=model,
        output_dir=Path(flat["output.dir"]),
        output_format=flat["output.format"],
        precision=flat["output.precision"],
        seed=flat["seed"],
        n_jobs=flat["run.n_jobs"],
        oracle_probes=flat["oracle.probes"],
        source=source,
    )


def load_config(path):
    """
    Lee un fichero de configuración YAML.

    Args:
        path (str | Path): Ruta del fichero

    Returns:
        RunConfig: configuración validada

    Raises:
        ConfigError: fichero inexistente, YAML inválido o valores inválidos
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError("config", f"file not found: {path}")
    try:
        with open(path, encoding="utf-8") as f:
            raw = yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise ConfigError("config", f"invalid YAML in {path}: {exc}") from None
    run = config_from_mapping(raw or {}, source=path)
    logger.info("configuración cargada desde %s", path)
    return run
