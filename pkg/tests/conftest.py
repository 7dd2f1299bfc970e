"""Shared fixtures for the workbench tests"""

import logging
from pathlib import Path

import numpy as np
import pytest

from scripts.device import DeviceSimulator, MaterialParams, reference_device_stack
from scripts.workbench.config import load_config

ROOT = Path(__file__).resolve().parents[1]
CONFIG_PATH = ROOT / 'configs' / 'sic_pin_diode.yaml'


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ('VSI_SEED', 'VSI_THREADS', 'VSI_LOG_LEVEL'):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def logger():
    return logging.getLogger('VSI_Workbench.tests')


@pytest.fixture
def stack():
    return reference_device_stack()


@pytest.fixture
def material():
    return MaterialParams()


@pytest.fixture
def simulator(logger):
    return DeviceSimulator(logger)


@pytest.fixture
def config_path():
    return CONFIG_PATH


@pytest.fixture
def run_config():
    return load_config(CONFIG_PATH, use_dotenv=False)


@pytest.fixture
def fast_config(run_config):
    """Bundled config with a short ODMR sweep so that synth stays quick"""
    odmr = run_config.experiment.odmr
    odmr.voltages_v = [0.0, 30.0]
    odmr.start_mhz = 66.0
    odmr.stop_mhz = 74.0
    odmr.step_mhz = 0.2
    return run_config


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
