import logging

import pytest

from conftest import BAL_CLASSICAL_PARAMS
from core.errors import DomainError
from service.fit_service import FitService, parse_bounds, parse_params, parse_range, setup_logging


def test_parse_helpers():
    assert parse_bounds(['A0:100:200', 'k1:0.01:1']) == {'A0': (100.0, 200.0), 'k1': (0.01, 1.0)}
    assert parse_params('1750, 0.01,') == [1750.0, 0.01]
    assert parse_range('0:170') == (0.0, 170.0)
    for bad in (lambda: parse_bounds(['A0:100']), lambda: parse_range('0-170'), lambda: parse_params('a,b')):
        with pytest.raises(DomainError):
            bad()


def test_given_parameters_report(bal_series):
    report = FitService().evaluate_at('bal-classical', bal_series, BAL_CLASSICAL_PARAMS)
    assert report.sse == pytest.approx(775.2225, abs=0.5)
    assert report.diagnostics['source'] == 'given'
    assert report.seed is None
    assert report.points[2]['residual'] == pytest.approx(200.0 - 172.9499, abs=5e-4)


def test_verify_flags_a_wrong_sse(bal_series):
    service = FitService()
    payload = service.evaluate_at('bal-classical', bal_series, BAL_CLASSICAL_PARAMS).to_dict()
    assert service.verify(payload, bal_series) == []
    payload['sse'] += 1.0
    assert any('sse' in problem for problem in service.verify(payload, bal_series))


def test_verify_rejects_unknown_report_kind():
    with pytest.raises(DomainError):
        FitService().verify({'kind': 'histogram'})


def test_series_order_from_environment(monkeypatch):
    monkeypatch.setenv('FRACFIT_SERIES_ORDER', '60')
    assert FitService().series_cfg.double_series_order == 60
    assert FitService(series_order=30).series_cfg.double_series_order == 30


def test_setup_logging_writes_file(tmp_path):
    log_file = tmp_path / 'logs' / 'engine.log'
    setup_logging('INFO', log_file)
    logging.getLogger('fitting.multistart').info("multistart finished")
    for handler in logging.getLogger().handlers:
        handler.flush()
    assert 'fitting.multistart - INFO - multistart finished' in log_file.read_text()
    setup_logging('WARNING')
