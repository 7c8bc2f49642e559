"""
🧪 Shared fixtures: the reference device, its calibrated lumped model and readout chain.
"""

import sys
from pathlib import Path

import pytest

# Add repo root to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.config import DEFAULT_CONFIG_PATH, parse_device_config, read_config_file
from src.dynamics import Calibration, build_lumped_model, drive_for_amplitude
from src.geometry import device_from_config
from src.readout import build_readout_chain


@pytest.fixture(scope="session")
def reference_text():
    return read_config_file(DEFAULT_CONFIG_PATH)


@pytest.fixture(scope="session")
def reference_config(reference_text):
    return parse_device_config(reference_text)


@pytest.fixture(scope="session")
def reference_spec(reference_config):
    return device_from_config(reference_config)


@pytest.fixture(scope="session")
def calibrated_model(reference_spec):
    return build_lumped_model(reference_spec, Calibration(3998.0, 4020.0, 500.0, 67.0))


@pytest.fixture(scope="session")
def reference_drive(calibrated_model):
    return drive_for_amplitude(calibrated_model)


@pytest.fixture(scope="session")
def reference_chain(reference_config, calibrated_model, reference_drive):
    sim = reference_config.simulation
    return build_readout_chain(reference_config.readout, calibrated_model, reference_drive, sim.horizon_s - sim.settle_s)
