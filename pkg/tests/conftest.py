"""Test configuration and fixtures."""

import numpy as np
import pytest

from core.config import Settings
from formal.genus1 import genus1_algebra
from landau.operators import LandauModel


@pytest.fixture(scope="session")
def test_settings():
    """Settings for test runs."""
    return Settings(
        log_level="DEBUG",
        log_format="console",
        max_workers=2,
    )


@pytest.fixture
def rng():
    """Seeded generator; every test gets a fresh one."""
    return np.random.default_rng(20240607)


@pytest.fixture(scope="session")
def algebra():
    """Genus-one algebra at level 1."""
    return genus1_algebra(1)


@pytest.fixture(scope="session")
def small_model():
    """Landau model small enough for fast dense norms."""
    return LandauModel(1, 24)


@pytest.fixture
def output_dir(tmp_path):
    """Per-test report directory."""
    return str(tmp_path / "reports")
