"""
Classical and Fractional Phenomenon Models
World population growth, two-compartment blood alcohol level, video tape counter
"""
import math
from typing import Iterable

import numpy as np
from scipy import special

from core.errors import ConvergenceError, DegenerateParametersError, DomainError, SeriesOverflowError
from core.quadrature import adaptive_gauss_legendre
from core.specfun import LOG_FLOAT_MAX, SeriesConfig, gamma, mittag_leffler, mittag_leffler_many
from models.params import BalParams, PopulationParams, TapeParams

_EPS = float(np.finfo(float).eps)


def _check_time(t: float) -> float:
    t = float(t)
    if not (t >= 0 and math.isfinite(t)):
        raise DomainError(f"model time must be finite and non-negative, got {t}")
    return t


# --- World population ---------------------------------------------------------

def population_classical(t: float, theta: PopulationParams) -> float:
    """Malthusian growth N0 exp(P t)"""
    t = _check_time(t)
    try:
        return theta.N0 * math.exp(theta.P * t)
    except OverflowError as e:
        raise SeriesOverflowError(f"exp({theta.P * t}) overflows") from e


def population_fractional(t: float, theta: PopulationParams, cfg: SeriesConfig = None) -> float:
    """Fractional growth N0 E_alpha(P t^alpha)"""
    t = _check_time(t)
    return theta.N0 * mittag_leffler(theta.alpha, theta.P * t ** theta.alpha, cfg)


def population_fractional_many(ts: Iterable[float], theta: PopulationParams, cfg: SeriesConfig = None) -> np.ndarray:
    times = np.array([_check_time(t) for t in ts], dtype=float)
    return theta.N0 * mittag_leffler_many(theta.alpha, theta.P * times ** theta.alpha, cfg)


# --- Blood alcohol level ------------------------------------------------------

def bal_classical_A(t: float, theta: BalParams) -> float:
    """Stomach concentration A0 exp(-k1 t)"""
    t = _check_time(t)
    return theta.A0 * math.exp(-theta.k1 * t)


def bal_classical_B(t: float, theta: BalParams) -> float:
    """Blood concentration A0 k1/(k2 - k1) (exp(-k1 t) - exp(-k2 t))"""
    t = _check_time(t)
    if abs(theta.k1 - theta.k2) < 1e-12:
        raise DegenerateParametersError(f"k1 and k2 coincide ({theta.k1}); classical B(t) is singular")
    return theta.A0 * theta.k1 / (theta.k2 - theta.k1) * (math.exp(-theta.k1 * t) - math.exp(-theta.k2 * t))


def bal_fractional_A(t: float, theta: BalParams, cfg: SeriesConfig = None) -> float:
    """Fractional stomach concentration A0 E_alpha(-k1 t^alpha)"""
    t = _check_time(t)
    return theta.A0 * mittag_leffler(theta.alpha, -theta.k1 * t ** theta.alpha, cfg)


def bal_fractional_A_many(ts: Iterable[float], theta: BalParams, cfg: SeriesConfig = None) -> np.ndarray:
    times = np.array([_check_time(t) for t in ts], dtype=float)
    return theta.A0 * mittag_leffler_many(theta.alpha, -theta.k1 * times ** theta.alpha, cfg)


def _double_series_table(theta: BalParams, order: int):
    """
    Time-independent parts of the B(t) double series, indexed [m, n]: exponents,
    log coefficients, signs, and the magnitude of every log-space component
    (which scales the rounding error of each term)
    """
    idx = np.arange(order + 1)
    m = idx[:, None]
    n = idx[None, :]
    exponent = m * theta.alpha + (n + 1) * theta.beta_ord
    log_gamma = special.gammaln(exponent + 1.0)
    log_k1, log_k2 = m * math.log(theta.k1), n * math.log(theta.k2)
    log_coeff = log_k1 + log_k2 - log_gamma
    sign = np.where((m + n) % 2 == 0, 1.0, -1.0)
    log_scale = 4.0 + np.abs(log_k1) + np.abs(log_k2) + np.abs(log_gamma)
    return exponent, log_coeff, sign, log_scale


def bal_fractional_B_many(ts: Iterable[float], theta: BalParams, cfg: SeriesConfig = None) -> np.ndarray:
    """
    Fractional blood concentration at several times.

    B(t) = k1 A0 sum_m sum_n (-k1)^m (-k2)^n t^(m alpha + n beta + beta) / Gamma(n beta + beta + m alpha + 1),
    truncated at m, n <= double_series_order. Terms are built as sign * exp(log magnitude)
    and accumulated exactly.

    The terms on the last row and column estimate the omitted tail; together with a
    first-order bound on the rounding of every term it must stay below
    double_series_rtol * |sum|, otherwise ConvergenceError is raised.
    """
    cfg = cfg or SeriesConfig()
    times = [_check_time(t) for t in ts]
    exponent, log_coeff, sign, log_scale = _double_series_table(theta, cfg.double_series_order)
    out = np.zeros(len(times))
    for i, t in enumerate(times):
        if t == 0.0:
            continue
        log_powers = exponent * math.log(t)
        logs = log_coeff + log_powers
        if logs.max() > LOG_FLOAT_MAX:
            raise SeriesOverflowError(f"double-series term overflows at t={t} for {theta}")
        magnitudes = np.exp(logs)
        total = math.fsum((sign * magnitudes).ravel())
        tail = magnitudes[-1, :].sum() + magnitudes[:-1, -1].sum()
        rounding = _EPS * float(np.sum(magnitudes * (log_scale + np.abs(log_powers))))
        if not tail + rounding <= cfg.double_series_rtol * abs(total):
            raise ConvergenceError(
                f"double series of order {cfg.double_series_order} has not converged at t={t} for {theta} "
                f"(tail {tail:.3e}, rounding {rounding:.3e}, sum {total:.3e})"
            )
        out[i] = theta.k1 * theta.A0 * total
    return out


def bal_fractional_B(t: float, theta: BalParams, cfg: SeriesConfig = None) -> float:
    """Fractional blood concentration at a single time; B(0) = 0"""
    return float(bal_fractional_B_many([t], theta, cfg)[0])


# --- Video tape counter -------------------------------------------------------

def tape_classical(t: float, theta: TapeParams) -> float:
    """Counter reading a (sqrt(b t + 1) - 1) with a = 2p/b"""
    t = _check_time(t)
    return theta.amplitude * (math.sqrt(theta.b * t + 1.0) - 1.0)


def tape_fractional(t: float, theta: TapeParams, tol: float = None, max_panels: int = None) -> float:
    """
    Fractional reading p/Gamma(alpha) int_0^t (t-s)^(alpha-1) / sqrt(b s + 1) ds.

    With w = (t-s)^alpha the kernel disappears: the integral becomes
    (1/alpha) int_0^(t^alpha) 1/sqrt(b (t - w^(1/alpha)) + 1) dw.
    """
    t = _check_time(t)
    if t == 0.0:
        return 0.0
    alpha, b = theta.alpha, theta.b
    inv_alpha = 1.0 / alpha

    def integrand(w: np.ndarray) -> np.ndarray:
        s = np.maximum(t - w ** inv_alpha, 0.0)
        return 1.0 / np.sqrt(b * s + 1.0)

    kwargs = {}
    if tol is not None:
        kwargs['tol'] = tol
    if max_panels is not None:
        kwargs['max_panels'] = max_panels
    integral = adaptive_gauss_legendre(integrand, 0.0, t ** alpha, **kwargs)
    return theta.p * integral / gamma(alpha + 1.0)
