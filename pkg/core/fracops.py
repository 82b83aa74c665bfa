"""
Numerical Fractional Operators
Riemann fractional integral (product trapezoid) and Caputo derivative (L1 scheme)
on uniform grids, used as oracles for the closed-form model solutions
"""
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from core.errors import DomainError
from core.specfun import gamma

# Grid membership tolerance, in units of the step
_GRID_SLACK = 1e-9


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Samples y(t_k) on the uniform grid t_k = a + k * step"""

    a: float
    step: float
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)
        if values.ndim != 1 or values.size < 3:
            raise DomainError("a grid function needs at least 3 samples")
        if not self.step > 0:
            raise DomainError(f"grid step must be positive, got {self.step}")

    @classmethod
    def from_callable(cls, func: Callable[[float], float], a: float, t_max: float, step: float) -> "GridFunction":
        """Sample func on [a, t_max] with the given step"""
        if not t_max > a:
            raise DomainError(f"t_max must exceed a, got [{a}, {t_max}]")
        n = int(round((t_max - a) / step))
        times = a + step * np.arange(n + 1)
        return cls(a=float(a), step=float(step), values=np.array([func(t) for t in times], dtype=float))

    @property
    def t_max(self) -> float:
        return self.a + self.step * (self.values.size - 1)

    @property
    def times(self) -> np.ndarray:
        return self.a + self.step * np.arange(self.values.size)

    def index_of(self, t: float) -> int:
        """Grid index of t; raises if t is off-grid or at the left endpoint"""
        pos = (float(t) - self.a) / self.step
        j = int(round(pos))
        if abs(pos - j) > _GRID_SLACK * max(1.0, abs(pos)) or j < 1 or j >= self.values.size:
            raise DomainError(f"t={t} is not an interior grid point of [{self.a}, {self.t_max}]")
        return j


def _integral_weights(j: int, alpha: float) -> np.ndarray:
    """Product-trapezoid weights for I^alpha at grid index j (before the h^alpha / Gamma(alpha+2) factor)"""
    k = np.arange(j + 1, dtype=float)
    m = j - k
    p = alpha + 1.0
    w = (m + 1.0) ** p - 2.0 * m ** p + np.abs(m - 1.0) ** p
    w[0] = (j - 1.0) ** p - (j - 1.0 - alpha) * j ** alpha
    w[j] = 1.0
    return w


def frac_integral(y: GridFunction, alpha: float, t: float) -> float:
    """Riemann fractional integral I^alpha y(t) = 1/Gamma(alpha) int_a^t (t-s)^(alpha-1) y(s) ds"""
    if not alpha > 0:
        raise DomainError(f"fractional integral requires alpha > 0, got {alpha}")
    j = y.index_of(t)
    w = _integral_weights(j, alpha)
    scale = y.step ** alpha / gamma(alpha + 2.0)
    return scale * math.fsum(w * y.values[: j + 1])


def _check_caputo_order(alpha: float):
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"Caputo derivative is implemented for alpha in (0, 1), got {alpha}")


def _l1_at(y: GridFunction, alpha: float, j: int) -> float:
    m = np.arange(j, dtype=float)
    b = (m + 1.0) ** (1.0 - alpha) - m ** (1.0 - alpha)
    diffs = np.diff(y.values[: j + 1])
    # b is indexed by distance from t_j: interval k pairs with b[j-k-1]
    return y.step ** (-alpha) / gamma(2.0 - alpha) * math.fsum(b[::-1] * diffs)


def caputo_derivative(y: GridFunction, alpha: float, t: float) -> float:
    """Caputo derivative of order alpha in (0, 1) by the L1 scheme"""
    _check_caputo_order(alpha)
    return _l1_at(y, alpha, y.index_of(t))


def caputo_grid(y: GridFunction, alpha: float) -> GridFunction:
    """L1 Caputo derivative at every grid point (zero at the left endpoint)"""
    _check_caputo_order(alpha)
    out = np.zeros(y.values.size)
    for j in range(1, y.values.size):
        out[j] = _l1_at(y, alpha, j)
    return GridFunction(a=y.a, step=y.step, values=out)


def volterra_residual(
    model_curve: GridFunction,
    rhs: Callable[[float, float], float],
    alpha: float,
    y_a: float,
) -> float:
    """
    Max over the grid of |y(t) - y_a - I^alpha f(., y(.))(t)|.

    A closed-form solution of C-D^alpha y = f(t, y), y(a) = y_a satisfies the
    Volterra equation, so this is O(step^2) for smooth solutions. alpha = 1
    reduces to the ordinary Cauchy problem.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"volterra_residual requires alpha in (0, 1], got {alpha}")
    forcing = GridFunction(
        a=model_curve.a,
        step=model_curve.step,
        values=[rhs(t, v) for t, v in zip(model_curve.times, model_curve.values)],
    )
    worst = abs(model_curve.values[0] - y_a)
    for j, t in enumerate(model_curve.times[1:], start=1):
        err = abs(model_curve.values[j] - y_a - frac_integral(forcing, alpha, t))
        worst = max(worst, err)
    return float(worst)


def caputo_of_identity(t: float, alpha: float) -> float:
    """Closed-form Caputo derivative of y(t) = t from 0, alpha in (0, 2)"""
    if not 0.0 < alpha < 2.0:
        raise DomainError(f"alpha must lie in (0, 2), got {alpha}")
    if t < 0:
        raise DomainError(f"t must be non-negative, got {t}")
    if alpha > 1.0:
        return 0.0
    if alpha == 1.0:
        return 1.0
    return t ** (1.0 - alpha) / gamma(2.0 - alpha)
