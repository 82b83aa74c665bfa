"""
Shared fixtures for the Fractional Fit Engine test suite
"""
import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from core.specfun import SeriesConfig  # noqa: E402
from dataio.bundled import bundled_dataset  # noqa: E402

BAL_TIMES = [0, 10, 20, 30, 45, 80, 90, 110, 170]
BAL_VALUES = [0, 150, 200, 160, 130, 70, 60, 40, 20]

# Published classical fit and its predictions at t = 10 ... 170
BAL_CLASSICAL_PARAMS = (245.8769, 0.109456, 0.017727)
BAL_CLASSICAL_TABLE = [147.5379, 172.9499, 161.3813, 130.0021, 71.0018, 59.4910, 41.7418, 14.4100]

# Published fractional fit and its predictions at t = 10 ... 170
BAL_FRACTIONAL_PARAMS = (373.0295, 0.0643, 0.0088, 1.1771, 1.0052)
BAL_FRACTIONAL_TABLE = [155.7458, 187.1950, 169.6587, 128.4871, 69.3254, 59.3669, 43.7670, 16.2108]

# The fractional parameters above are printed to 4-5 digits; this point lies inside their
# rounding box and reproduces the published predictions to 5e-4
BAL_FRACTIONAL_PARAMS_UNROUNDED = (373.02952, 0.064335, 0.0088106, 1.177124, 1.005216)


@pytest.fixture
def bal_series():
    return bundled_dataset('bal')


@pytest.fixture
def series_cfg():
    return SeriesConfig()


@pytest.fixture
def external_dir(tmp_path, monkeypatch):
    """Empty external-data directory for the duration of a test"""
    path = tmp_path / 'external'
    path.mkdir()
    monkeypatch.setenv('FRACFIT_EXTERNAL_DATA_DIR', str(path))
    return path
