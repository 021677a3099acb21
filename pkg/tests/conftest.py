import json

import numpy as np
import pytest

from darkcool.core.basis import build_grid, harmonic_eigenbasis
from darkcool.core.model import GridSpec, SimulationConfig, TsepPolicy


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run the full-size cooling runs")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def small_config():
    """Harmonic trap light enough for a few hundred pulses in a test."""
    return SimulationConfig(
        lamb_dicke=1.0,
        thermal_quanta=4.0,
        doughnut_order=1,
        doughnut_width=10.0,
        tsep_policy=TsepPolicy.random_uniform(0.1, 1.1),
        num_pulses=40,
        basis_size=60,
        grid=GridSpec(),
        quadrature_order=32,
        rng_seed=7,
    )


@pytest.fixture
def small_basis():
    return harmonic_eigenbasis(build_grid(12.0, 1024), 30)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def write_json(tmp_path):
    def write(name, payload):
        path = tmp_path / name
        path.write_text(json.dumps(payload), encoding="utf-8")
        return path

    return write
