"""
Pytest configuration and fixtures.

This module provides fixtures for testing the library, including the test
settings override, channel configurations for the reference presets and
seeded Monte Carlo ensembles shared across test modules.
"""

import math
from typing import Dict

import pytest

from jacobi_mimo.config import Settings, settings
from jacobi_mimo.core.mgf import clear_caches
from jacobi_mimo.core.montecarlo import run_ensemble
from jacobi_mimo.schemas import REFERENCE_PRESETS, ChannelConfig, McEnsemble

TEST_SEED = 12345
TEST_SAMPLES = 20_000


# Test settings with smaller Monte Carlo sizes
@pytest.fixture(scope="session")
def test_settings() -> Settings:
    """
    Create test settings with reduced Monte Carlo sizes.

    Returns:
        Settings: Test settings
    """
    return Settings(
        ENV="testing",
        DEBUG=True,
        LOG_LEVEL="DEBUG",
        MC_SAMPLES=TEST_SAMPLES,
        MC_CHUNK_SIZE=5_000,
        MC_SEED=TEST_SEED,
        WORKERS=2,
    )


# Override settings for tests
@pytest.fixture(scope="session", autouse=True)
def override_settings(test_settings: Settings) -> None:
    """
    Override settings for tests.

    Args:
        test_settings: Test settings
    """
    # Replace the global settings with test settings
    for key, value in test_settings.model_dump().items():
        setattr(settings, key, value)
    clear_caches()


@pytest.fixture
def presets() -> Dict[str, ChannelConfig]:
    """
    Named reference configurations.

    Returns:
        Dict[str, ChannelConfig]: The preset registry
    """
    return dict(REFERENCE_PRESETS)


@pytest.fixture(scope="session")
def single_mode() -> ChannelConfig:
    """
    The smallest channel, ``(1,1,2)`` with ``q = 2``.

    ``I = ln(1 + 2x)`` with ``x`` uniform on ``[0, 1]``, so the MGF is
    ``(3^(i kappa + 1) - 1) / (2 (i kappa + 1))``.

    Returns:
        ChannelConfig: Test channel
    """
    return ChannelConfig(m=1, n=1, l=2, q=(2.0,))


@pytest.fixture(scope="session")
def single_mode_mean() -> float:
    """Exact mean of the single-mode channel, ``(3 ln 3 - 2) / 2``."""
    return (3.0 * math.log(3.0) - 2.0) / 2.0


@pytest.fixture(scope="session")
def strong_cfg() -> ChannelConfig:
    """
    ``(3,6,12)`` with a strongly unequal allocation.

    Returns:
        ChannelConfig: Test channel
    """
    return REFERENCE_PRESETS["m3n6-strong"]


@pytest.fixture(scope="session")
def wide_cfg() -> ChannelConfig:
    """
    ``(4,3,10)``, a channel with more transmit than receive modes.

    Returns:
        ChannelConfig: Test channel
    """
    return REFERENCE_PRESETS["m4n3"]


@pytest.fixture(scope="session")
def strong_ensemble(strong_cfg: ChannelConfig, override_settings: None) -> McEnsemble:
    """
    Seeded ensemble of the strong ``(3,6,12)`` channel.

    Args:
        strong_cfg: Channel configuration

    Returns:
        McEnsemble: ``TEST_SAMPLES`` samples
    """
    return run_ensemble(strong_cfg, TEST_SAMPLES, TEST_SEED)


@pytest.fixture(scope="session")
def wide_ensemble(wide_cfg: ChannelConfig, override_settings: None) -> McEnsemble:
    """
    Seeded ensemble of the ``(4,3,10)`` channel.

    Args:
        wide_cfg: Channel configuration

    Returns:
        McEnsemble: ``TEST_SAMPLES`` samples
    """
    return run_ensemble(wide_cfg, TEST_SAMPLES, TEST_SEED)
