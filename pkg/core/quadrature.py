"""
Adaptive Gauss-Legendre Quadrature
"""
import logging
import math
from typing import Callable

import numpy as np

from config import FractionalConfig
from core.errors import DomainError, QuadratureError

logger = logging.getLogger(__name__)

_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(FractionalConfig.GAUSS_LEGENDRE_NODES)


def gauss_legendre(func: Callable[[np.ndarray], np.ndarray], lo: float, hi: float) -> float:
    """Fixed-order Gauss-Legendre rule on [lo, hi]; func must accept an array of nodes"""
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    return half * float(np.dot(_WEIGHTS, func(mid + half * _NODES)))


def adaptive_gauss_legendre(
    func: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    tol: float = FractionalConfig.QUADRATURE_TOLERANCE,
    max_panels: int = FractionalConfig.QUADRATURE_MAX_PANELS,
) -> float:
    """
    Integrate func over [lo, hi] to an absolute tolerance.

    A panel is accepted when its two halves agree with the whole-panel rule to
    within the panel's length-proportional share of tol; otherwise it is split.
    """
    if not hi >= lo:
        raise DomainError(f"integration limits must satisfy lo <= hi, got [{lo}, {hi}]")
    if hi == lo:
        return 0.0

    length = hi - lo
    pending = [(lo, hi, gauss_legendre(func, lo, hi))]
    accepted = []
    panels = 1
    while pending:
        a, b, whole = pending.pop()
        mid = 0.5 * (a + b)
        left = gauss_legendre(func, a, mid)
        right = gauss_legendre(func, mid, b)
        panels += 2
        if abs(left + right - whole) <= tol * (b - a) / length or mid in (a, b):
            accepted.append(left)
            accepted.append(right)
            continue
        if panels > max_panels:
            raise QuadratureError(f"adaptive quadrature exceeded {max_panels} panels on [{lo}, {hi}]")
        pending.append((a, mid, left))
        pending.append((mid, b, right))

    logger.debug("adaptive quadrature on [%s, %s] used %d panels", lo, hi, panels)
    return math.fsum(accepted)
