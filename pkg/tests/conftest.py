"""Shared fixtures and hypothesis configuration for the suite."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from needlelab.corpus import standard_corpus

# Quadrature-backed properties are slow per example; the profile trades
# example count for determinism so CI results are reproducible.
settings.register_profile(
    "needlelab",
    deadline=None,
    derandomize=True,
    suppress_health_check=(HealthCheck.too_slow,),
)
settings.load_profile("needlelab")


@pytest.fixture(scope="session")
def corpus():
    return standard_corpus()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
