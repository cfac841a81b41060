import numpy as np
import pytest

from ice_beamsim.core.config import ScenarioConfig


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_config() -> ScenarioConfig:
    """Scenario small enough to run in a unit test."""
    return ScenarioConfig(
        n_ap=8,
        n_ue=8,
        grid_n=16,
        beamwidth_deg=22.5,
        n_paths=2,
        snr_db_sweep=[-10.0, 0.0],
        services={"gps": 5.0, "lte": 40.0},
        trials=3,
        seed=7,
    )
