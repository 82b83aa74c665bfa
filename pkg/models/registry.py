"""
Model Registry
Named parametric models exposing a uniform evaluation interface t -> M(t; theta)
"""
from dataclasses import dataclass, field, replace
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from config import FractionalConfig
from core.errors import DomainError, UnknownModelError
from core.fracops import caputo_of_identity
from core.specfun import SeriesConfig
from models.params import BalParams, PopulationParams, TapeParams
from models import phenomena

# curve(ts, full parameter values, series config) -> predictions
CurveFunction = Callable[[np.ndarray, np.ndarray, SeriesConfig], np.ndarray]


@dataclass(frozen=True)
class ParamSpec:
    """One model parameter: hard bounds, optional fixed value, and the box multistart samples from"""

    name: str
    lower: float
    upper: float
    fixed: bool = False
    fixed_value: Optional[float] = None
    start_lower: Optional[float] = None
    start_upper: Optional[float] = None

    def __post_init__(self):
        if self.fixed:
            if self.fixed_value is None:
                raise DomainError(f"fixed parameter {self.name} needs a fixed_value")
        elif not self.lower < self.upper:
            raise DomainError(f"free parameter {self.name} needs lower < upper, got [{self.lower}, {self.upper}]")

    @property
    def start_box(self) -> Tuple[float, float]:
        lo = self.lower if self.start_lower is None else max(self.lower, self.start_lower)
        hi = self.upper if self.start_upper is None else min(self.upper, self.start_upper)
        if not lo < hi:
            lo, hi = self.lower, self.upper
        return lo, hi


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """A named parametric model; immutable and safe to share between threads"""

    name: str
    params: Tuple[ParamSpec, ...]
    curve: CurveFunction
    series_cfg: SeriesConfig = field(default_factory=SeriesConfig)
    description: str = ''
    fittable: bool = True
    # classical counterpart and the map from its parameters (plus one order value) to ours
    classical: Optional[str] = None
    from_classical: Optional[Callable[[np.ndarray, float], np.ndarray]] = None

    @property
    def param_names(self) -> List[str]:
        return [p.name for p in self.params]

    @property
    def free_indices(self) -> List[int]:
        return [i for i, p in enumerate(self.params) if not p.fixed]

    @property
    def lower(self) -> np.ndarray:
        return np.array([p.fixed_value if p.fixed else p.lower for p in self.params], dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array([p.fixed_value if p.fixed else p.upper for p in self.params], dtype=float)

    def _values(self, theta) -> np.ndarray:
        values = np.asarray(getattr(theta, 'values', theta), dtype=float)
        if values.shape != (len(self.params),):
            raise DomainError(f"{self.name} expects {len(self.params)} parameters {self.param_names}, got {values.size}")
        return values

    def evaluate(self, t: float, theta) -> float:
        return float(self.curve(np.array([t], dtype=float), self._values(theta), self.series_cfg)[0])

    def evaluate_many(self, ts: Sequence[float], theta) -> np.ndarray:
        return np.asarray(self.curve(np.asarray(ts, dtype=float), self._values(theta), self.series_cfg), dtype=float)

    def with_bounds(self, overrides: Mapping[str, Tuple[float, float]]) -> "ModelSpec":
        """Copy with replaced hard bounds; start boxes are clipped into the new bounds"""
        unknown = set(overrides) - set(self.param_names)
        if unknown:
            raise DomainError(f"{self.name} has no parameter(s) {sorted(unknown)}")
        params = tuple(
            replace(p, lower=float(overrides[p.name][0]), upper=float(overrides[p.name][1])) if p.name in overrides else p
            for p in self.params
        )
        return replace(self, params=params)

    def with_series_config(self, cfg: SeriesConfig) -> "ModelSpec":
        return replace(self, series_cfg=cfg)


# --- Curves -------------------------------------------------------------------

def _population_classical_curve(ts, v, cfg):
    theta = PopulationParams(N0=v[0], P=v[1])
    return np.array([phenomena.population_classical(t, theta) for t in ts])


def _population_fractional_curve(ts, v, cfg):
    theta = PopulationParams(N0=v[0], P=v[1], alpha=v[2])
    return phenomena.population_fractional_many(ts, theta, cfg)


def _bal_classical_curve(ts, v, cfg):
    theta = BalParams(A0=v[0], k1=v[1], k2=v[2])
    return np.array([phenomena.bal_classical_B(t, theta) for t in ts])


def _bal_fractional_curve(ts, v, cfg):
    theta = BalParams(A0=v[0], k1=v[1], k2=v[2], alpha=v[3], beta_ord=v[4])
    return phenomena.bal_fractional_B_many(ts, theta, cfg)


def _bal_fractional_stomach_curve(ts, v, cfg):
    theta = BalParams(A0=v[0], k1=v[1], k2=v[2], alpha=v[3], beta_ord=v[4])
    return phenomena.bal_fractional_A_many(ts, theta, cfg)


def _tape_classical_curve(ts, v, cfg):
    theta = TapeParams.from_classical(a=v[0], b=v[1])
    return np.array([phenomena.tape_classical(t, theta) for t in ts])


def _tape_fractional_curve(ts, v, cfg):
    theta = TapeParams(p=v[0], b=v[1], alpha=v[2])
    return np.array([phenomena.tape_fractional(t, theta) for t in ts])


def _caputo_of_t_curve(ts, v, cfg):
    return np.array([caputo_of_identity(t, v[0]) for t in ts])


# --- Classical-to-fractional parameter maps -----------------------------------

def _population_from_classical(v, order):
    return np.array([v[0], v[1], order])


def _bal_from_classical(v, order):
    return np.array([v[0], v[1], v[2], order, order])


def _tape_from_classical(v, order):
    return np.array([v[0] * v[1] / 2.0, v[1], order])


# --- Parameter helpers --------------------------------------------------------

def _rate(name: str, start: Tuple[float, float]) -> ParamSpec:
    lo, hi = FractionalConfig.RATE_BOUNDS
    return ParamSpec(name, lo, hi, start_lower=start[0], start_upper=start[1])


def _order(name: str, start: Tuple[float, float] = (0.8, 1.4)) -> ParamSpec:
    lo, hi = FractionalConfig.ORDER_BOUNDS
    return ParamSpec(name, lo, hi, start_lower=start[0], start_upper=start[1])


def _fixed_n0() -> ParamSpec:
    lo, hi = FractionalConfig.RATE_BOUNDS
    return ParamSpec('N0', lo, hi, fixed=True, fixed_value=1750.0)


def _bal_params() -> Tuple[ParamSpec, ...]:
    return (
        _rate('A0', (200.0, 500.0)),
        _rate('k1', (0.02, 0.15)),
        _rate('k2', (0.002, 0.03)),
        _order('alpha'),
        _order('beta'),
    )


_FACTORIES: Dict[str, Callable[[], ModelSpec]] = {
    'population-classical': lambda: ModelSpec(
        'population-classical',
        (_fixed_n0(), _rate('P', (0.001, 0.03))),
        _population_classical_curve,
        description='N(t) = N0 exp(P t)',
    ),
    'population-fractional': lambda: ModelSpec(
        'population-fractional',
        (_fixed_n0(), _rate('P', (0.001, 0.03)), _order('alpha', (0.8, 1.6))),
        _population_fractional_curve,
        description='N(t) = N0 E_alpha(P t^alpha)',
        classical='population-classical',
        from_classical=_population_from_classical,
    ),
    'bal-classical': lambda: ModelSpec(
        'bal-classical',
        (_rate('A0', (150.0, 450.0)), _rate('k1', (0.05, 0.3)), _rate('k2', (0.005, 0.04))),
        _bal_classical_curve,
        description='B(t) = A0 k1/(k2-k1) (exp(-k1 t) - exp(-k2 t))',
    ),
    'bal-fractional': lambda: ModelSpec(
        'bal-fractional',
        _bal_params(),
        _bal_fractional_curve,
        description='B(t) = k1 A0 sum_m sum_n (-k1)^m (-k2)^n t^(m alpha + n beta + beta) / Gamma(...)',
        classical='bal-classical',
        from_classical=_bal_from_classical,
    ),
    'bal-fractional-stomach': lambda: ModelSpec(
        'bal-fractional-stomach',
        _bal_params(),
        _bal_fractional_stomach_curve,
        description='A(t) = A0 E_alpha(-k1 t^alpha)',
        fittable=False,
    ),
    'tape-classical': lambda: ModelSpec(
        'tape-classical',
        (_rate('a', (200.0, 3000.0)), _rate('b', (0.001, 0.1))),
        _tape_classical_curve,
        description='n(t) = a (sqrt(b t + 1) - 1)',
    ),
    'tape-fractional': lambda: ModelSpec(
        'tape-fractional',
        (_rate('p', (1.0, 50.0)), _rate('b', (0.001, 0.1)), _order('alpha', (0.8, 1.2))),
        _tape_fractional_curve,
        description='n(t) = p/Gamma(alpha) int_0^t (t-s)^(alpha-1) / sqrt(b s + 1) ds',
        classical='tape-classical',
        from_classical=_tape_from_classical,
    ),
    'caputo-of-t': lambda: ModelSpec(
        'caputo-of-t',
        (_order('alpha'),),
        _caputo_of_t_curve,
        description='Caputo derivative of y(t) = t; zero for alpha > 1',
        fittable=False,
    ),
}

# Classical/fractional pairs compared by the CLI
MODEL_PAIRS = {
    'population': ('population-classical', 'population-fractional'),
    'bal': ('bal-classical', 'bal-fractional'),
    'tape': ('tape-classical', 'tape-fractional'),
}


def list_models() -> List[str]:
    return sorted(_FACTORIES)


def get_model(name: str, series_cfg: SeriesConfig = None) -> ModelSpec:
    """Look up a model by registry name"""
    try:
        model = _FACTORIES[name]()
    except KeyError:
        raise UnknownModelError(f"unknown model '{name}'; available: {', '.join(list_models())}") from None
    if series_cfg is not None:
        model = model.with_series_config(series_cfg)
    return model
