"""
Special Functions for Fractional Models
Gamma, log-Gamma, Beta and the one-parameter Mittag-Leffler function
"""
import logging
import math
import threading
from dataclasses import dataclass, field, replace
from typing import Iterable

import mpmath
import numpy as np
from scipy import special

from config import FractionalConfig
from core.errors import ConvergenceError, DomainError, SeriesOverflowError

logger = logging.getLogger(__name__)

LOG_FLOAT_MAX = math.log(np.finfo(float).max)

# mpmath precision is process-global state
_MP_LOCK = threading.Lock()


@dataclass(frozen=True)
class SeriesConfig:
    """Truncation orders and tolerances for series evaluation"""

    max_terms: int = field(default=FractionalConfig.MAX_TERMS)
    tail_tolerance: float = field(default=FractionalConfig.TAIL_TOLERANCE)
    double_series_order: int = field(default=FractionalConfig.DOUBLE_SERIES_ORDER)
    double_series_rtol: float = field(default=FractionalConfig.DOUBLE_SERIES_RTOL)

    def __post_init__(self):
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise DomainError(f"max_terms must be a positive integer, got {self.max_terms}")
        if int(self.double_series_order) != self.double_series_order or self.double_series_order < 1:
            raise DomainError(f"double_series_order must be a positive integer, got {self.double_series_order}")
        if self.max_terms < self.double_series_order:
            raise DomainError("max_terms must be at least double_series_order")
        if not self.tail_tolerance >= 0:
            raise DomainError(f"tail_tolerance must be non-negative, got {self.tail_tolerance}")
        if not self.double_series_rtol > 0:
            raise DomainError(f"double_series_rtol must be positive, got {self.double_series_rtol}")

    def with_order(self, order: int) -> "SeriesConfig":
        """Copy with a different double-series order (max_terms grows if needed)"""
        return replace(self, max_terms=max(self.max_terms, order), double_series_order=order)


def _is_pole(t: float) -> bool:
    return t <= 0 and t == math.floor(t)


def gamma(t: float) -> float:
    """Gamma function; poles at the non-positive integers"""
    t = float(t)
    if math.isnan(t) or _is_pole(t):
        raise DomainError(f"gamma is undefined at {t}")
    value = float(special.gamma(t))
    if math.isinf(value):
        raise SeriesOverflowError(f"gamma({t}) overflows")
    return value


def ln_gamma(t: float) -> float:
    """Natural log of Gamma for positive arguments"""
    t = float(t)
    if not t > 0:
        raise DomainError(f"ln_gamma requires t > 0, got {t}")
    return float(special.gammaln(t))


def beta(a: float, b: float) -> float:
    """Euler Beta function B(a, b) = Gamma(a) Gamma(b) / Gamma(a + b)"""
    a, b = float(a), float(b)
    if not (a > 0 and b > 0):
        raise DomainError(f"beta requires a, b > 0, got ({a}, {b})")
    return float(special.beta(a, b))


def _truncation_index(log_terms: np.ndarray, cfg: SeriesConfig) -> int:
    """Number of leading terms kept: stop at the first term below the tail tolerance"""
    if cfg.tail_tolerance > 0:
        below = np.flatnonzero(log_terms[1:] < math.log(cfg.tail_tolerance)) + 1
        if below.size:
            return int(below[0])
    next_term = math.exp(min(float(log_terms[-1]), LOG_FLOAT_MAX - 1.0))
    if next_term > 1e6 * cfg.tail_tolerance:
        raise ConvergenceError(
            f"Mittag-Leffler series did not converge in {cfg.max_terms} terms (next term {next_term:.3e})"
        )
    return cfg.max_terms


def _extended_sum(alpha: float, t: float, cfg: SeriesConfig, peak_log10: float) -> float:
    """Re-sum an alternating series in extended precision with a relative tail bound"""
    dps = 20 + 2 * int(math.ceil(max(peak_log10, 0.0)))
    with _MP_LOCK, mpmath.workdps(dps):
        x = mpmath.mpf(t)
        a = mpmath.mpf(alpha)
        tol = mpmath.mpf(cfg.tail_tolerance)
        total = mpmath.mpf(0)
        for k in range(cfg.max_terms):
            total += mpmath.power(x, k) * mpmath.rgamma(a * k + 1)
            nxt = abs(mpmath.power(x, k + 1) * mpmath.rgamma(a * (k + 1) + 1))
            if nxt < tol * min(1, abs(total)):
                break
        return float(total)


def mittag_leffler(alpha: float, t: float, cfg: SeriesConfig = None) -> float:
    """
    One-parameter Mittag-Leffler function E_alpha(t) = sum t^k / Gamma(alpha k + 1).

    Terms are formed in log space from ln_gamma and summed with exact (fsum)
    accumulation. Negative arguments whose largest term dwarfs the sum are
    re-summed in extended precision.
    """
    cfg = cfg or SeriesConfig()
    alpha, t = float(alpha), float(t)
    if not alpha > 0:
        raise DomainError(f"mittag_leffler requires alpha > 0, got {alpha}")
    if not math.isfinite(t):
        raise DomainError(f"mittag_leffler requires a finite argument, got {t}")
    if t == 0.0:
        return 1.0

    k = np.arange(cfg.max_terms + 1, dtype=float)
    log_terms = k * math.log(abs(t)) - special.gammaln(alpha * k + 1.0)
    n_terms = _truncation_index(log_terms, cfg)
    kept = log_terms[:n_terms]
    peak_log = float(kept.max())
    if peak_log > LOG_FLOAT_MAX:
        raise SeriesOverflowError(f"Mittag-Leffler term overflows for alpha={alpha}, t={t}")

    terms = np.exp(kept)
    if t < 0:
        terms[1::2] *= -1.0
    total = math.fsum(terms)

    if t < 0 and not abs(total) * FractionalConfig.EXTENDED_PRECISION_RATIO >= math.exp(peak_log):
        logger.debug("extended-precision Mittag-Leffler for alpha=%s t=%s", alpha, t)
        return _extended_sum(alpha, t, cfg, peak_log / math.log(10.0))
    return total


def mittag_leffler_many(alpha: float, ts: Iterable[float], cfg: SeriesConfig = None) -> np.ndarray:
    """E_alpha evaluated at every argument in ts"""
    cfg = cfg or SeriesConfig()
    return np.array([mittag_leffler(alpha, t, cfg) for t in ts], dtype=float)
