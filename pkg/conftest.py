import math

import numpy as np
import pytest

from clocknet.schemas.spacetime import ClockSpec, PhaseSet, SpacetimeConfig


@pytest.fixture
def earth() -> SpacetimeConfig:
    return SpacetimeConfig()


@pytest.fixture
def clocks() -> ClockSpec:
    return ClockSpec()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240501)


@pytest.fixture
def random_phases(rng):
    def make() -> PhaseSet:
        return PhaseSet.from_reduced(
            list(rng.uniform(0.0, 2.0 * math.pi, 3)), list(rng.uniform(0.0, 2.0 * math.pi, 2))
        )

    return make
