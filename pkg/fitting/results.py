"""
Parameter vectors and fit results
"""
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

import numpy as np

from core.errors import DomainError


@dataclass(frozen=True)
class ParamVector:
    """A point in parameter space with per-entry box bounds"""

    names: Tuple[str, ...]
    values: Tuple[float, ...]
    bounds: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, 'names', tuple(self.names))
        object.__setattr__(self, 'values', tuple(float(v) for v in self.values))
        object.__setattr__(self, 'bounds', tuple((float(lo), float(hi)) for lo, hi in self.bounds))
        if not len(self.names) == len(self.values) == len(self.bounds):
            raise DomainError("names, values and bounds must have the same length")
        for name, value, (lo, hi) in zip(self.names, self.values, self.bounds):
            if not lo <= value <= hi:
                raise DomainError(f"{name}={value} lies outside [{lo}, {hi}]")

    @classmethod
    def for_model(cls, model, values: Sequence[float]) -> "ParamVector":
        """Attach a model's bounds to values (fixed entries take their fixed value)"""
        values = [
            p.fixed_value if p.fixed else float(v)
            for p, v in zip(model.params, values)
        ]
        return cls(
            names=tuple(model.param_names),
            values=tuple(values),
            bounds=tuple(zip(model.lower, model.upper)),
        )

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(self.names, self.values))


@dataclass(frozen=True, eq=False)
class FitResult:
    """Outcome of a least-squares fit"""

    best_params: ParamVector
    sse: float
    residuals: np.ndarray
    iterations: int
    converged: bool
    start_point: ParamVector
    start_sse: float = math.nan
    gradient_norm: float = math.nan
    evaluations: int = 0
    start_index: int = 0
    message: str = ''
    failed_starts: List[str] = field(default_factory=list)

    def __post_init__(self):
        residuals = np.array(self.residuals, dtype=float)
        residuals.setflags(write=False)
        object.__setattr__(self, 'residuals', residuals)
