from types import SimpleNamespace

import numpy as np
import pytest

from conftest import BAL_CLASSICAL_PARAMS, BAL_TIMES
from core.errors import DomainError, FitError
from dataio.timeseries import TimeSeries
from fitting.lm_solver import central_jacobian, efficiency_gain, forward_jacobian, lm_fit, residuals, sse
from fitting.multistart import classical_seeded_start, latin_hypercube_starts, multistart_fit
from fitting.results import ParamVector
from models.registry import ModelSpec, ParamSpec, get_model


def synthetic(model, values, ts):
    y = model.evaluate_many(ts, values)
    return TimeSeries(name='synthetic', t_unit='', y_unit='', points=tuple(zip(ts, y)))


class TestObjective:
    def test_sse_of_exact_data_is_zero(self):
        model = get_model('bal-classical')
        data = synthetic(model, BAL_CLASSICAL_PARAMS, BAL_TIMES)
        assert sse(model, BAL_CLASSICAL_PARAMS, data) == 0.0

    def test_residual_sign_is_observed_minus_predicted(self, bal_series):
        model = get_model('bal-classical')
        r = residuals(model, BAL_CLASSICAL_PARAMS, bal_series)
        assert r[2] == pytest.approx(200.0 - 172.9499, abs=5e-4)

    def test_sse_ignores_row_order(self, bal_series):
        model = get_model('bal-classical')
        order = np.random.default_rng(5).permutation(len(bal_series))
        shuffled = SimpleNamespace(t=bal_series.t[order], y=bal_series.y[order])
        assert sse(model, BAL_CLASSICAL_PARAMS, shuffled) == pytest.approx(sse(model, BAL_CLASSICAL_PARAMS, bal_series), rel=1e-12)

    def test_efficiency_gain(self):
        assert efficiency_gain(775.2225, 321.9677) == pytest.approx(0.5847, abs=1e-4)
        assert efficiency_gain(10.0, 10.0) == 0.0
        with pytest.raises(DomainError):
            efficiency_gain(0.0, 1.0)
        with pytest.raises(DomainError):
            efficiency_gain(1.0, -1.0)


class TestParamVector:
    def test_values_must_lie_in_bounds(self):
        with pytest.raises(DomainError):
            ParamVector(names=('x',), values=(2.0,), bounds=((0.0, 1.0),))

    def test_for_model_pins_fixed_entries(self):
        model = get_model('population-classical')
        pv = ParamVector.for_model(model, [1.0, 0.01])
        assert pv.as_dict() == {'N0': 1750.0, 'P': 0.01}


class TestJacobian:
    def test_forward_agrees_with_central(self, bal_series):
        model = get_model('bal-classical')
        fwd = forward_jacobian(model, BAL_CLASSICAL_PARAMS, bal_series)
        ctr = central_jacobian(model, BAL_CLASSICAL_PARAMS, bal_series)
        np.testing.assert_allclose(fwd, ctr, rtol=1e-4, atol=1e-6 * np.abs(ctr).max())

    def test_step_at_upper_bound_goes_backwards(self, bal_series):
        model = get_model('bal-classical').with_bounds({'A0': (100.0, 245.8769)})
        jac = forward_jacobian(model, BAL_CLASSICAL_PARAMS, bal_series)
        assert np.all(np.isfinite(jac))


class TestLevenbergMarquardt:
    def test_recovers_classical_bal_from_noiseless_data(self):
        model = get_model('bal-classical')
        data = synthetic(model, BAL_CLASSICAL_PARAMS, BAL_TIMES)
        start = ParamVector.for_model(model, [220.0, 0.09, 0.02])
        result = lm_fit(model, start, data)
        assert result.converged
        np.testing.assert_allclose(result.best_params.values, BAL_CLASSICAL_PARAMS, rtol=1e-6)

    def test_recovers_tape_classical_from_noiseless_data(self):
        model = get_model('tape-classical')
        truth = (1200.0, 0.012)
        data = synthetic(model, truth, np.arange(0.0, 245.0, 5.0))
        result = lm_fit(model, ParamVector.for_model(model, [900.0, 0.02]), data)
        np.testing.assert_allclose(result.best_params.values, truth, rtol=1e-6)

    def test_sse_never_increases(self, bal_series):
        model = get_model('bal-classical')
        start = ParamVector.for_model(model, [300.0, 0.2, 0.01])
        result = lm_fit(model, start, bal_series)
        assert result.sse <= result.start_sse
        assert result.start_point == start

    def test_respects_bounds(self, bal_series):
        model = get_model('bal-classical').with_bounds({'A0': (100.0, 200.0)})
        result = lm_fit(model, ParamVector.for_model(model, [150.0, 0.1, 0.02]), bal_series)
        a0 = result.best_params.as_dict()['A0']
        assert 100.0 <= a0 <= 200.0
        assert a0 == pytest.approx(200.0)

    def test_fixed_parameter_is_not_moved(self):
        model = get_model('population-classical')
        data = synthetic(model, [1750.0, 0.012], np.arange(0.0, 101.0, 10.0))
        result = lm_fit(model, ParamVector.for_model(model, [1750.0, 0.005]), data)
        assert result.best_params.values[0] == 1750.0
        assert result.best_params.values[1] == pytest.approx(0.012, rel=1e-6)

    def test_residuals_are_read_only(self, bal_series):
        model = get_model('bal-classical')
        result = lm_fit(model, BAL_CLASSICAL_PARAMS, bal_series)
        with pytest.raises(ValueError):
            result.residuals[0] = 0.0


def _failing_curve(ts, values, cfg):
    raise DomainError("cannot evaluate")


class TestMultistart:
    def test_starts_fill_the_start_boxes(self):
        model = get_model('bal-fractional')
        starts = latin_hypercube_starts(model, 32, seed=7)
        assert len(starts) == 32
        values = np.array([s.values for s in starts])
        for j, spec in enumerate(model.params):
            lo, hi = spec.start_box
            assert np.all((values[:, j] >= lo) & (values[:, j] <= hi))
            # one start per stratum
            strata = np.floor((values[:, j] - lo) / (hi - lo) * 32).astype(int)
            assert sorted(np.clip(strata, 0, 31)) == list(range(32))

    def test_starts_depend_only_on_seed(self):
        model = get_model('bal-classical')
        a = latin_hypercube_starts(model, 8, seed=3)
        b = latin_hypercube_starts(model, 8, seed=3)
        c = latin_hypercube_starts(model, 8, seed=4)
        assert a == b
        assert a != c

    def test_needs_at_least_one_start(self):
        with pytest.raises(DomainError):
            latin_hypercube_starts(get_model('bal-classical'), 0, seed=0)

    def test_deterministic_across_worker_counts(self, bal_series):
        model = get_model('bal-classical')
        serial = multistart_fit(model, bal_series, n_starts=8, seed=1, max_workers=1)
        parallel = multistart_fit(model, bal_series, n_starts=8, seed=1, max_workers=4)
        assert serial.best_params == parallel.best_params
        assert serial.sse == parallel.sse
        assert serial.start_index == parallel.start_index

    def test_best_start_is_no_worse_than_any_single_start(self, bal_series):
        model = get_model('bal-classical')
        best = multistart_fit(model, bal_series, n_starts=6, seed=2)
        singles = [lm_fit(model, s, bal_series).sse for s in latin_hypercube_starts(model, 6, seed=2)]
        assert best.sse == min(singles)

    def test_all_starts_failing_raises(self, bal_series):
        broken = ModelSpec('broken', (ParamSpec('x', 0.0, 1.0),), _failing_curve)
        with pytest.raises(FitError):
            multistart_fit(broken, bal_series, n_starts=3, seed=0)


class TestSeededStart:
    def population_data(self):
        model = get_model('population-fractional')
        return model, synthetic(model, [1750.0, 0.01, 1.2], np.arange(0.0, 101.0, 10.0))

    def test_start_carries_the_classical_fit(self):
        model, data = self.population_data()
        start = classical_seeded_start(model, data, seed=0)
        classical = multistart_fit(get_model('population-classical'), data, seed=0)
        assert start.as_dict() == {'N0': 1750.0, 'P': classical.best_params.as_dict()['P'], 'alpha': 1.05}

    def test_single_start_fit_runs_from_the_seeded_start(self):
        model, data = self.population_data()
        single = multistart_fit(model, data, n_starts=1, seed=0)
        direct = lm_fit(model, classical_seeded_start(model, data, seed=0), data)
        assert single.start_point == direct.start_point
        assert single.best_params == direct.best_params
        assert single.sse == direct.sse
        assert single.best_params.as_dict()['alpha'] == pytest.approx(1.2, rel=1e-4)

    def test_classical_models_have_no_seeded_start(self, bal_series):
        with pytest.raises(DomainError):
            classical_seeded_start(get_model('bal-classical'), bal_series)
