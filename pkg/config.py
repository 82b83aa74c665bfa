"""
Fractional Fit Engine Configuration
"""
import os
from pathlib import Path

import psutil


class FractionalConfig:
    """Configuration management for the Fractional Fit Engine"""

    TOOL_NAME = "fractional-fit-engine"
    VERSION = "1.0.0"

    # Series evaluation
    MAX_TERMS = 200
    TAIL_TOLERANCE = 1e-14
    DOUBLE_SERIES_ORDER = 45
    DOUBLE_SERIES_RTOL = 1e-3  # allowed tail + rounding estimate, relative to |B(t)|
    DEFAULT_START_ORDER = 1.05  # fractional orders of a single start seeded from the classical fit
    EXTENDED_PRECISION_RATIO = 1e3  # largest term / |sum| above which we re-sum in mpmath

    # Quadrature
    GAUSS_LEGENDRE_NODES = 10
    QUADRATURE_TOLERANCE = 1e-10
    QUADRATURE_MAX_PANELS = 4096

    # Least-squares solver
    MAX_ITERATIONS = 500
    GRADIENT_TOLERANCE = 1e-8
    RELATIVE_DECREASE_TOLERANCE = 1e-12
    FD_STEP = 1e-7
    INITIAL_DAMPING = 1e-3
    MAX_DAMPING = 1e16

    # Parameter boxes
    ORDER_BOUNDS = (0.05, 1.95)
    RATE_BOUNDS = (1e-6, 1e4)

    # Multistart
    DEFAULT_STARTS = 16
    DEFAULT_SEED = 0

    # Logging
    LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    DEFAULT_LOG_LEVEL = 'WARNING'

    @classmethod
    def get_data_dir(cls) -> Path:
        """Get the bundled dataset directory"""
        override = os.getenv('FRACFIT_DATA_DIR')
        if override:
            return Path(override)
        return Path(__file__).resolve().parent / 'data'

    @classmethod
    def get_external_data_dir(cls) -> Path:
        """Get the directory holding user-ingested series (population, tape)"""
        override = os.getenv('FRACFIT_EXTERNAL_DATA_DIR')
        if override:
            return Path(override)
        return cls.get_data_dir() / 'external'

    @classmethod
    def get_series_order(cls) -> int:
        """Get the double-series truncation order from environment or default"""
        return int(os.getenv('FRACFIT_SERIES_ORDER', cls.DOUBLE_SERIES_ORDER))

    @classmethod
    def get_log_level(cls) -> str:
        """Get log level from environment or default"""
        return os.getenv('FRACFIT_LOG_LEVEL', cls.DEFAULT_LOG_LEVEL).upper()

    @classmethod
    def get_log_file(cls):
        """Get optional log file path from environment"""
        path = os.getenv('FRACFIT_LOG_FILE')
        return Path(path) if path else None

    @classmethod
    def get_max_workers(cls) -> int:
        """Get worker count for parallel multistart fits"""
        override = os.getenv('FRACFIT_MAX_WORKERS')
        if override:
            return max(1, int(override))
        cores = psutil.cpu_count(logical=False) or psutil.cpu_count() or 1
        return max(1, min(8, cores))
