"""
Fit Service for the Fractional Fit Engine
Fit, compare, evaluate and verify workflows behind the command-line launcher
"""
import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from config import FractionalConfig
from core.errors import DomainError, FractionalEngineError
from core.specfun import SeriesConfig
from dataio.bundled import resolve_dataset
from dataio.timeseries import TimeSeries
from fitting.lm_solver import efficiency_gain, residuals
from fitting.multistart import multistart_fit
from fitting.results import FitResult, ParamVector
from models.registry import ModelSpec, get_model

logger = logging.getLogger(__name__)

VERIFY_TOLERANCE = 1e-10
CURVE_POINTS = 200


def setup_logging(level: Optional[str] = None, log_file: Optional[Union[str, Path]] = None) -> None:
    """Configure root logging: stderr always, plus a log file when one is given"""
    level = (level or FractionalConfig.get_log_level()).upper()
    log_file = log_file or FractionalConfig.get_log_file()
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        Path(log_file).parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format=FractionalConfig.LOG_FORMAT,
        handlers=handlers,
        force=True,
    )


@dataclass
class FitReport:
    """Machine-readable record of one model fitted (or evaluated) on one dataset"""

    model: str
    dataset: str
    dataset_sha256: str
    params: List[Dict[str, Any]]
    sse: float
    points: List[Dict[str, float]]
    diagnostics: Dict[str, Any]
    seed: Optional[int] = None
    efficiency_gain: Optional[float] = None
    tool: str = FractionalConfig.TOOL_NAME
    version: str = FractionalConfig.VERSION

    @property
    def converged(self) -> bool:
        return bool(self.diagnostics.get('converged', False))

    @property
    def param_values(self) -> Dict[str, float]:
        return {p['name']: p['value'] for p in self.params}

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': 'fit', **asdict(self)}


@dataclass
class CompareReport:
    """Classical and fractional reports on the same data, side by side"""

    classical: FitReport
    fractional: FitReport
    efficiency_gain: float
    table: List[Dict[str, float]] = field(default_factory=list)

    @property
    def converged(self) -> bool:
        return self.classical.converged and self.fractional.converged

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': 'compare',
            'tool': FractionalConfig.TOOL_NAME,
            'version': FractionalConfig.VERSION,
            'classical': self.classical.to_dict(),
            'fractional': self.fractional.to_dict(),
            'efficiency_gain': self.efficiency_gain,
            'table': self.table,
        }


def parse_bounds(specs: Sequence[str]) -> Dict[str, Tuple[float, float]]:
    """`name:lo:hi` strings to a bounds-override mapping"""
    overrides = {}
    for spec in specs or ():
        parts = spec.split(':')
        if len(parts) != 3:
            raise DomainError(f"bounds must look like name:lo:hi, got '{spec}'")
        name, lo, hi = parts
        try:
            overrides[name] = (float(lo), float(hi))
        except ValueError:
            raise DomainError(f"bounds for {name} are not numbers: '{spec}'") from None
    return overrides


def parse_params(text: str) -> List[float]:
    """Comma-separated parameter values"""
    try:
        return [float(v) for v in text.split(',') if v.strip()]
    except ValueError:
        raise DomainError(f"parameters must be comma-separated numbers, got '{text}'") from None


def parse_range(text: str) -> Tuple[float, float]:
    """`a:b` to (a, b)"""
    parts = text.split(':')
    if len(parts) != 2:
        raise DomainError(f"range must look like a:b, got '{text}'")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError:
        raise DomainError(f"range bounds are not numbers: '{text}'") from None


def write_json(payload: Mapping[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2, allow_nan=True) + '\n', encoding='utf-8')
    logger.info("report written to %s", path)
    return path


class FitService:
    """Runs the engine's workflows with one set of solver and series settings"""

    def __init__(
        self,
        starts: int = FractionalConfig.DEFAULT_STARTS,
        seed: int = FractionalConfig.DEFAULT_SEED,
        series_order: Optional[int] = None,
        bounds: Optional[Mapping[str, Tuple[float, float]]] = None,
        max_workers: Optional[int] = None,
    ):
        self.starts = starts
        self.seed = seed
        self.series_order = FractionalConfig.get_series_order() if series_order is None else series_order
        self.bounds = dict(bounds or {})
        self.max_workers = max_workers
        self.series_cfg = SeriesConfig().with_order(self.series_order)

    def model(self, name: str, apply_bounds: bool = True) -> ModelSpec:
        model = get_model(name, self.series_cfg)
        if apply_bounds:
            overrides = {k: v for k, v in self.bounds.items() if k in model.param_names}
            if overrides:
                model = model.with_bounds(overrides)
        return model

    def _check_bounds_known(self, *models: ModelSpec) -> None:
        known = set().union(*(m.param_names for m in models))
        unknown = set(self.bounds) - known
        if unknown:
            raise DomainError(f"bounds given for unknown parameter(s) {sorted(unknown)}")

    # --- reports ---------------------------------------------------------------

    def _report(self, model: ModelSpec, data: TimeSeries, params: ParamVector, diagnostics: Dict[str, Any]) -> FitReport:
        predicted = model.evaluate_many(data.t, params)
        r = data.y - predicted
        points = [
            {'t': float(t), 'observed': float(y), 'predicted': float(p), 'residual': float(e)}
            for t, y, p, e in zip(data.t, data.y, predicted, r)
        ]
        spec_by_name = {p.name: p for p in model.params}
        param_rows = [
            {
                'name': name,
                'value': value,
                'lower': lo,
                'upper': hi,
                'fixed': spec_by_name[name].fixed,
            }
            for name, value, (lo, hi) in zip(params.names, params.values, params.bounds)
        ]
        diagnostics = {'series_order': self.series_order, **diagnostics}
        return FitReport(
            model=model.name,
            dataset=data.name,
            dataset_sha256=data.digest(),
            params=param_rows,
            sse=float(np.dot(r, r)),
            points=points,
            diagnostics=diagnostics,
            seed=self.seed if diagnostics.get('source') == 'fit' else None,
        )

    def _fit_diagnostics(self, result: FitResult) -> Dict[str, Any]:
        return {
            'source': 'fit',
            'converged': result.converged,
            'message': result.message,
            'iterations': result.iterations,
            'evaluations': result.evaluations,
            'start_index': result.start_index,
            'start_sse': result.start_sse,
            'gradient_norm': result.gradient_norm,
            'starts': self.starts,
            'failed_starts': list(result.failed_starts),
            'bounds': {k: list(v) for k, v in self.bounds.items()},
        }

    # --- workflows -------------------------------------------------------------

    def fit(self, model_name: str, data: TimeSeries) -> FitReport:
        """Multistart least-squares fit of one model"""
        model = self.model(model_name)
        self._check_bounds_known(model)
        if not model.fittable:
            raise DomainError(f"{model.name} is an evaluation-only curve and cannot be fitted")
        logger.info("fitting %s to %s (%d starts, seed %d)", model.name, data.name, self.starts, self.seed)
        result = multistart_fit(model, data, self.starts, self.seed, max_workers=self.max_workers)
        return self._report(model, data, result.best_params, self._fit_diagnostics(result))

    def evaluate_at(self, model_name: str, data: TimeSeries, values: Sequence[float]) -> FitReport:
        """Report for given (not fitted) parameters"""
        model = self.model(model_name, apply_bounds=False)
        values = list(values)
        if len(values) != len(model.params):
            raise DomainError(f"{model.name} expects {len(model.params)} parameters {model.param_names}, got {len(values)}")
        params = ParamVector(
            names=model.param_names,
            values=values,
            bounds=[(min(v, lo), max(v, hi)) for v, lo, hi in zip(values, model.lower, model.upper)],
        )
        # raises on invalid parameters before anything is reported
        residuals(model, params, data)
        return self._report(model, data, params, {'source': 'given', 'converged': True})

    def compare(
        self,
        classical_name: str,
        fractional_name: str,
        data: TimeSeries,
        classical_params: Optional[Sequence[float]] = None,
    ) -> CompareReport:
        """Fit both models (or take the classical one as given) and compute the efficiency gain"""
        self._check_bounds_known(self.model(classical_name, False), self.model(fractional_name, False))
        if classical_params is not None:
            classical = self.evaluate_at(classical_name, data, classical_params)
        else:
            classical = self.fit(classical_name, data)
        fractional = classical if fractional_name == classical_name and classical_params is None else self.fit(fractional_name, data)
        gain = efficiency_gain(classical.sse, fractional.sse)
        table = [
            {'t': c['t'], 'observed': c['observed'], 'classical': c['predicted'], 'fractional': f['predicted']}
            for c, f in zip(classical.points, fractional.points)
        ]
        classical.efficiency_gain = gain
        fractional.efficiency_gain = gain
        return CompareReport(classical=classical, fractional=fractional, efficiency_gain=gain, table=table)

    def curve(self, model_name: str, values: Sequence[float], t_min: float, t_max: float, n_points: int) -> List[Tuple[float, float]]:
        """n_points uniform samples of a model on [t_min, t_max]"""
        if int(n_points) != n_points or n_points < 2:
            raise DomainError(f"need at least 2 points, got {n_points}")
        if not t_min < t_max:
            raise DomainError(f"need t_min < t_max, got {t_min}:{t_max}")
        model = self.model(model_name, apply_bounds=False)
        ts = np.linspace(t_min, t_max, int(n_points))
        values = model.evaluate_many(ts, np.asarray(values, dtype=float))
        if not np.all(np.isfinite(values)):
            raise DomainError(f"{model.name} is not finite on [{t_min}, {t_max}] for these parameters")
        return list(zip(ts.tolist(), values.tolist()))

    def export_curves(self, report: CompareReport, path: Union[str, Path], n_points: int = CURVE_POINTS) -> Path:
        """Dense classical and fractional curves over the data range, as CSV"""
        t_lo = report.classical.points[0]['t']
        t_hi = report.classical.points[-1]['t']
        classical = self.curve(report.classical.model, list(report.classical.param_values.values()), t_lo, t_hi, n_points)
        fractional = self.curve(report.fractional.model, list(report.fractional.param_values.values()), t_lo, t_hi, n_points)
        frame = pd.DataFrame({
            't': [t for t, _ in classical],
            report.classical.model: [v for _, v in classical],
            report.fractional.model: [v for _, v in fractional],
        })
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, float_format='%.12g')
        logger.info("curves written to %s", path)
        return path

    # --- verification ----------------------------------------------------------

    def verify(self, payload: Mapping[str, Any], data: Optional[TimeSeries] = None) -> List[str]:
        """
        Recompute every number of a fit or compare report from its parameters.
        Returns a list of mismatches (empty when the report checks out).
        """
        kind = payload.get('kind')
        if kind == 'fit':
            return self._verify_fit(payload, data, 'fit')
        if kind == 'compare':
            problems = self._verify_fit(payload['classical'], data, 'classical')
            problems += self._verify_fit(payload['fractional'], data, 'fractional')
            try:
                gain = efficiency_gain(payload['classical']['sse'], payload['fractional']['sse'])
            except DomainError as e:
                problems.append(f"efficiency gain: {e}")
            else:
                if not _close(gain, payload['efficiency_gain']):
                    problems.append(f"efficiency gain: report has {payload['efficiency_gain']}, recomputed {gain}")
            for row, c, f in zip(payload['table'], payload['classical']['points'], payload['fractional']['points']):
                if not (_close(row['classical'], c['predicted']) and _close(row['fractional'], f['predicted'])):
                    problems.append(f"table row t={row['t']} disagrees with the per-model predictions")
            return problems
        raise DomainError(f"not a fit or compare report (kind={kind!r})")

    def _verify_fit(self, section: Mapping[str, Any], data: Optional[TimeSeries], label: str) -> List[str]:
        problems = []
        order = section.get('diagnostics', {}).get('series_order', self.series_order)
        model = get_model(section['model'], SeriesConfig().with_order(order))
        values = np.array([p['value'] for p in section['params']], dtype=float)
        if [p['name'] for p in section['params']] != model.param_names:
            return [f"{label}: parameter names do not match {model.name}"]

        ts = np.array([p['t'] for p in section['points']], dtype=float)
        observed = np.array([p['observed'] for p in section['points']], dtype=float)
        if data is not None:
            if data.digest() != section['dataset_sha256']:
                problems.append(f"{label}: dataset hash {data.digest()} differs from the report's")
            elif not (np.array_equal(ts, data.t) and np.array_equal(observed, data.y)):
                problems.append(f"{label}: observations differ from the dataset")

        predicted = model.evaluate_many(ts, values)
        for point, p in zip(section['points'], predicted):
            if not _close(point['predicted'], p):
                problems.append(f"{label}: predicted at t={point['t']} is {point['predicted']}, recomputed {p}")
            if not _close(point['residual'], point['observed'] - p):
                problems.append(f"{label}: residual at t={point['t']} is inconsistent")
        recomputed_sse = math.fsum((observed - predicted) ** 2)
        if not _close(section['sse'], recomputed_sse):
            problems.append(f"{label}: sse is {section['sse']}, recomputed {recomputed_sse}")
        return problems


def _close(a: float, b: float, tol: float = VERIFY_TOLERANCE) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def resolve_report_dataset(payload: Mapping[str, Any]) -> Optional[TimeSeries]:
    """The dataset a report names, if it can still be found"""
    section = payload['classical'] if payload.get('kind') == 'compare' else payload
    name = section.get('dataset', '')
    for ref in (f"bundled:{name}", name):
        try:
            return resolve_dataset(ref)
        except FractionalEngineError:
            continue
    logger.warning("dataset '%s' not found; verifying against the report's own observations", name)
    return None


# --- console summaries ----------------------------------------------------------

def _format_params(report: FitReport) -> str:
    return ', '.join(f"{p['name']}={p['value']:.6g}" for p in report.params)


def print_fit_summary(report: FitReport) -> None:
    status = "✅ converged" if report.converged else "⚠️ not converged"
    print(f"📈 {report.model} on {report.dataset}: {status}")
    print(f"   Parameters: {_format_params(report)}")
    print(f"   SSE: {report.sse:.6f}")
    diag = report.diagnostics
    if diag.get('source') == 'fit':
        print(f"   Best of {diag['starts']} starts (start #{diag['start_index']}, {diag['iterations']} iterations, {diag['message']})")
        if diag['failed_starts']:
            print(f"   {len(diag['failed_starts'])} start(s) failed")


def print_compare_summary(report: CompareReport) -> None:
    print("📊 CLASSICAL VS FRACTIONAL")
    print("============================================================")
    print_fit_summary(report.classical)
    print_fit_summary(report.fractional)
    print(f"🚀 Efficiency gain: {report.efficiency_gain:.4f}")
    print(f"{'t':>10} {'observed':>12} {'classical':>12} {'fractional':>12}")
    for row in report.table:
        print(f"{row['t']:>10.6g} {row['observed']:>12.6g} {row['classical']:>12.4f} {row['fractional']:>12.4f}")
    print("============================================================")
