"""
Pytest configuration and fixtures.
"""

import numpy as np
import pytest

from app.galois import get_field
from app.models.content import FileCatalog
from app.models.schemas import ScenarioSpec
from app.services.scenario_service import ScenarioService


@pytest.fixture
def gf16():
    """
    Provide the default field GF(2^16).

    Returns:
        GaloisField: q = 65536
    """
    return get_field(16)


@pytest.fixture
def gf4():
    """
    Provide the small field GF(2^4) used for exhaustive checks.

    Returns:
        GaloisField: q = 16
    """
    return get_field(4)


@pytest.fixture
def rng():
    """Seeded generator so every test is reproducible."""
    return np.random.default_rng(1234)


@pytest.fixture
def make_catalog(rng):
    """
    Factory for random file catalogs.

    Returns:
        Callable: (gf, n_files, symbols_per_file) -> FileCatalog
    """
    def _make(gf, n_files, symbols_per_file):
        return FileCatalog.generate(gf, n_files, symbols_per_file, rng)
    return _make


@pytest.fixture
def service():
    """A fresh scenario service."""
    return ScenarioService()


@pytest.fixture
def run(service):
    """
    Run a scenario from keyword arguments.

    Returns:
        Callable: (**spec fields) -> RunRecord
    """
    def _run(**kwargs):
        return service.run_scenario(ScenarioSpec(**kwargs))
    return _run
