"""
Shared fixtures for the lethargy test suite.
"""

import math
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

# Add the project root to Python path
project_root = Path(__file__).parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

from controller.app_controller import AppController  # noqa: E402
from model.config import Tolerances  # noqa: E402
from model.space_models import NormSpec  # noqa: E402

settings.register_profile(
    "lethargy", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("lethargy")

EXPONENTS = [1.0, 1.5, 2.0, 3.0, math.inf]


@pytest.fixture
def tolerances() -> Tolerances:
    return Tolerances()


@pytest.fixture(params=EXPONENTS, ids=lambda p: f"p={p:g}")
def space(request) -> NormSpec:
    """Five-dimensional space for each tested exponent."""
    return NormSpec(dim=5, p=request.param)


@pytest.fixture
def euclidean() -> NormSpec:
    return NormSpec(dim=5, p=2.0)


@pytest.fixture(autouse=True)
def fresh_controller(monkeypatch):
    """Each test sees a controller built from its own environment."""
    for name in ("LETHARGY_TOL_SOLVE", "LETHARGY_TOL_ROOT", "LETHARGY_TOL_VERIFY",
                 "LETHARGY_TOL_COMPARE", "LETHARGY_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    AppController.reset()
    yield
    AppController.reset()
