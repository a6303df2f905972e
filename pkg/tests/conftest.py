"""
Fixtures compartidas: el ejemplo lineal de referencia y una fábrica de
modelos con mallas pequeñas para que las pruebas sean rápidas.
"""

from pathlib import Path

import pytest

from certmenu.model_core import AttentionSpec, CostSpec, GridConfig, ModelConfig, TypeDistribution

PROJECT_DIR = Path(__file__).resolve().parents[1]
CONFIGS_DIR = PROJECT_DIR / "configs"


def build_config(alpha=1.0, gamma=0.25, sigma=2.0, kappa=1.0, theta_max=1.0,
                 loss_b=0.0, addiction_z=0.0, theta_points=2001, dist=None):
    return ModelConfig(
        attention=AttentionSpec(alpha=alpha, loss_b=loss_b, addiction_z=addiction_z),
        cost=CostSpec(kappa=kappa, sigma=sigma),
        dist=dist if dist is not None else TypeDistribution.uniform(theta_max),
        gamma=gamma,
        grid=GridConfig(theta_points=theta_points),
    )


@pytest.fixture
def make_cfg():
    """Fábrica de ModelConfig; por defecto el ejemplo lineal con 401 nodos."""
    def factory(**kwargs):
        kwargs.setdefault("theta_points", 401)
        return build_config(**kwargs)
    return factory


@pytest.fixture(scope="session")
def linear_cfg():
    """Atención lineal, γ = 1/4, c(v) = v²/2, θ ~ U[0, 1], malla por defecto."""
    return build_config()


@pytest.fixture(scope="session")
def linear_small():
    return build_config(theta_points=401)


@pytest.fixture(scope="session")
def narrow_cfg():
    """θ̄ = 1/2: aquí el certificado único óptimo no es perfecto."""
    return build_config(theta_max=0.5, theta_points=401)


@pytest.fixture
def configs_dir():
    return CONFIGS_DIR
