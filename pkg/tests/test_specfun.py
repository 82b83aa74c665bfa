import math

import numpy as np
import pytest
from scipy import special

from core.errors import ConvergenceError, DomainError, SeriesOverflowError
from core.specfun import (
    SeriesConfig,
    beta,
    gamma,
    ln_gamma,
    mittag_leffler,
    mittag_leffler_many,
)

RNG = np.random.default_rng(20240601)


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


class TestGamma:
    def test_integer_and_half_integer_values(self):
        assert gamma(5) == pytest.approx(24.0, rel=1e-14)
        assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)
        assert gamma(-0.5) == pytest.approx(-2.0 * math.sqrt(math.pi), rel=1e-14)

    @pytest.mark.parametrize('pole', [0.0, -1.0, -7.0])
    def test_poles_raise(self, pole):
        with pytest.raises(DomainError):
            gamma(pole)

    def test_overflow_is_reported(self):
        with pytest.raises(SeriesOverflowError):
            gamma(200.0)

    def test_ln_gamma_matches_log_factorial(self):
        assert ln_gamma(10) == pytest.approx(math.log(362880.0), rel=1e-14)
        assert ln_gamma(500.0) == pytest.approx(math.lgamma(500.0), rel=1e-14)

    def test_ln_gamma_requires_positive_argument(self):
        with pytest.raises(DomainError):
            ln_gamma(0.0)

    @pytest.mark.parametrize('m', range(1, 13))
    def test_positive_integers_give_factorials(self, m):
        assert gamma(m) == pytest.approx(math.factorial(m - 1), rel=1e-13)

    def test_recurrence(self):
        for t in RNG.uniform(1e-3, 50.0, size=500):
            assert rel_err(gamma(t + 1.0) / gamma(t), t) < 1e-10

    def test_ln_gamma_of_54_is_log_factorial_sum(self):
        assert ln_gamma(54) == pytest.approx(math.fsum(math.log(k) for k in range(1, 54)), rel=1e-13)

    def test_beta(self):
        assert beta(2, 3) == pytest.approx(1.0 / 12.0, rel=1e-14)
        assert beta(0.5, 0.5) == pytest.approx(math.pi, rel=1e-14)
        with pytest.raises(DomainError):
            beta(-1.0, 2.0)

    def test_beta_is_symmetric(self):
        for a, b in RNG.uniform(0.05, 20.0, size=(100, 2)):
            assert rel_err(beta(a, b), beta(b, a)) < 1e-12


class TestMittagLeffler:
    def test_zero_argument_is_one(self):
        for alpha in RNG.uniform(0.05, 1.95, size=20):
            assert mittag_leffler(alpha, 0.0) == 1.0

    def test_order_one_is_exponential(self):
        for t in RNG.uniform(-10.0, 10.0, size=50):
            assert rel_err(mittag_leffler(1.0, t), math.exp(t)) < 1e-10

    def test_order_two_of_square_is_cosh(self):
        for t in RNG.uniform(0.0, 10.0, size=50):
            assert rel_err(mittag_leffler(2.0, t * t), math.cosh(t)) < 1e-10

    @pytest.mark.parametrize('x', [0.5, 1.0, 2.0, 3.0])
    def test_half_order_negative_argument_is_scaled_erfc(self, x):
        # E_{1/2}(-x) = exp(x^2) erfc(x); strong cancellation for larger x
        assert rel_err(mittag_leffler(0.5, -x), special.erfcx(x)) < 1e-10

    def test_half_order_at_one(self):
        assert mittag_leffler(0.5, 1.0) == pytest.approx(5.0089801, abs=5e-7)

    def test_many_matches_scalar(self):
        ts = np.linspace(-3.0, 3.0, 7)
        values = mittag_leffler_many(0.8, ts)
        assert values.shape == (7,)
        assert values[3] == 1.0
        assert values[5] == mittag_leffler(0.8, ts[5])

    def test_non_positive_order_raises(self):
        with pytest.raises(DomainError):
            mittag_leffler(0.0, 1.0)

    def test_non_finite_argument_raises(self):
        with pytest.raises(DomainError):
            mittag_leffler(1.0, math.inf)

    def test_divergent_truncation_raises(self):
        with pytest.raises(ConvergenceError):
            mittag_leffler(0.1, 50.0)


class TestSeriesConfig:
    def test_defaults(self):
        cfg = SeriesConfig()
        assert cfg.max_terms == 200
        assert cfg.tail_tolerance == 1e-14
        assert cfg.double_series_order == 45
        assert cfg.double_series_rtol == 1e-3

    def test_with_order_grows_max_terms(self):
        cfg = SeriesConfig(double_series_rtol=1e-6).with_order(300)
        assert cfg.double_series_order == 300
        assert cfg.max_terms == 300
        assert cfg.double_series_rtol == 1e-6

    def test_with_order_zero_raises(self):
        with pytest.raises(DomainError):
            SeriesConfig().with_order(0)

    @pytest.mark.parametrize('kwargs', [{'max_terms': 0}, {'double_series_order': 0}, {'tail_tolerance': -1.0}, {'double_series_rtol': 0.0}])
    def test_invalid_settings_raise(self, kwargs):
        with pytest.raises(DomainError):
            SeriesConfig(**kwargs)
