import pytest

from socdvfs import corpus, sim
from socdvfs.soc import default_config, operating_point


@pytest.fixture(scope="session")
def cfg():
    return default_config()


@pytest.fixture(scope="session")
def high_point(cfg):
    return operating_point(cfg, cfg.high_level)


@pytest.fixture(scope="session")
def low_point(cfg):
    return operating_point(cfg, 0)


@pytest.fixture(scope="session")
def calibration_traces():
    return corpus.calibration_corpus(500)


@pytest.fixture(scope="session")
def thresholds(cfg, calibration_traces):
    return sim.fit_thresholds(calibration_traces, cfg, bound=0.01)


@pytest.fixture(scope="session")
def calibrated_cfg(cfg):
    fit = sim.calibrate_coefficients({"memlight_soc_power_reduction": 0.105}, cfg)
    return cfg.replace(power_coefficients=fit.coefficients)
