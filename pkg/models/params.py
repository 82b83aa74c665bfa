"""
Parameter sets for the population, blood-alcohol and video-tape models
"""
import math
from dataclasses import dataclass

from core.errors import DomainError


def _check_order(name: str, value: float):
    if not 0.0 < value < 2.0:
        raise DomainError(f"{name} must lie in (0, 2), got {value}")


def _check_positive(name: str, value: float):
    if not (value > 0 and math.isfinite(value)):
        raise DomainError(f"{name} must be positive and finite, got {value}")


@dataclass(frozen=True)
class PopulationParams:
    """N0 in millions, P = B - M per year, alpha dimensionless"""

    N0: float
    P: float
    alpha: float = 1.0

    def __post_init__(self):
        _check_positive('N0', self.N0)
        if not math.isfinite(self.P):
            raise DomainError(f"P must be finite, got {self.P}")
        _check_order('alpha', self.alpha)


@dataclass(frozen=True)
class BalParams:
    """Two-compartment blood-alcohol parameters; rates per minute"""

    A0: float
    k1: float
    k2: float
    alpha: float = 1.0
    beta_ord: float = 1.0

    def __post_init__(self):
        _check_positive('A0', self.A0)
        _check_positive('k1', self.k1)
        _check_positive('k2', self.k2)
        _check_order('alpha', self.alpha)
        _check_order('beta_ord', self.beta_ord)


@dataclass(frozen=True)
class TapeParams:
    """
    Composite tape-counter parameters.

    p = kv/R(0) and b = cv/(pi R(0)^2); the classical amplitude is a = 2p/b.
    The physical constants themselves are not identifiable from counter readings.
    """

    p: float
    b: float
    alpha: float = 1.0

    def __post_init__(self):
        _check_positive('p', self.p)
        _check_positive('b', self.b)
        _check_order('alpha', self.alpha)

    @property
    def amplitude(self) -> float:
        """Classical amplitude a = 2p/b"""
        return 2.0 * self.p / self.b

    @classmethod
    def from_classical(cls, a: float, b: float) -> "TapeParams":
        """Build from the classical fit variables (a, b)"""
        return cls(p=a * b / 2.0, b=b, alpha=1.0)
