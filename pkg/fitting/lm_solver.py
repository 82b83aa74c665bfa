"""
Bounded Levenberg-Marquardt Least Squares
SSE objective, finite-difference Jacobians and the classical-vs-fractional efficiency metric
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from config import FractionalConfig
from core.errors import MODEL_EVALUATION_ERRORS, DomainError
from fitting.results import FitResult, ParamVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LMOptions:
    """Solver settings; defaults come from FractionalConfig"""

    max_iterations: int = FractionalConfig.MAX_ITERATIONS
    gradient_tolerance: float = FractionalConfig.GRADIENT_TOLERANCE
    relative_decrease_tolerance: float = FractionalConfig.RELATIVE_DECREASE_TOLERANCE
    fd_step: float = FractionalConfig.FD_STEP
    initial_damping: float = FractionalConfig.INITIAL_DAMPING
    max_damping: float = FractionalConfig.MAX_DAMPING


def _full_values(model, theta) -> np.ndarray:
    values = np.asarray(getattr(theta, 'values', theta), dtype=float)
    if values.shape != (len(model.params),):
        raise DomainError(f"{model.name} expects {len(model.params)} parameters, got {values.size}")
    return values


def residuals(model, theta, data) -> np.ndarray:
    """Observed minus predicted, y_i - M(t_i; theta)"""
    predicted = model.evaluate_many(data.t, _full_values(model, theta))
    r = data.y - predicted
    if not np.all(np.isfinite(r)):
        raise FloatingPointError(f"{model.name} produced non-finite predictions")
    return r


def sse(model, theta, data) -> float:
    """Sum of squared residuals E = sum (y_i - M_i)^2"""
    if len(data.t) == 0:
        raise DomainError("cannot compute SSE of an empty series")
    r = residuals(model, theta, data)
    return float(np.dot(r, r))


def efficiency_gain(e_classical: float, e_fractional: float) -> float:
    """|(E_classical - E_fractional) / E_classical|"""
    if not e_classical > 0:
        raise DomainError(f"classical error must be positive, got {e_classical}")
    if not e_fractional >= 0:
        raise DomainError(f"fractional error must be non-negative, got {e_fractional}")
    return abs((e_classical - e_fractional) / e_classical)


def _fd_steps(x: np.ndarray, step: float) -> np.ndarray:
    return np.maximum(step, step * np.abs(x))


def forward_jacobian(model, theta, data, r0: np.ndarray = None, step: float = FractionalConfig.FD_STEP) -> np.ndarray:
    """
    d(residual)/d(free parameter) by forward differences.

    A step that would leave the box, or that lands on a point the model cannot
    evaluate, is taken backwards instead.
    """
    x = _full_values(model, theta)
    if r0 is None:
        r0 = residuals(model, x, data)
    free = model.free_indices
    upper = model.upper
    lower = model.lower
    steps = _fd_steps(x[free], step)
    jac = np.empty((r0.size, len(free)))
    for col, (i, h) in enumerate(zip(free, steps)):
        directions = (h, -h) if x[i] + h <= upper[i] else (-h, h)
        for d in directions:
            if not lower[i] <= x[i] + d <= upper[i]:
                continue
            shifted = x.copy()
            shifted[i] = x[i] + d
            try:
                jac[:, col] = (residuals(model, shifted, data) - r0) / d
                break
            except MODEL_EVALUATION_ERRORS:
                continue
        else:
            raise DomainError(f"cannot differentiate {model.name} with respect to {model.params[i].name} at {x[i]}")
    return jac


def central_jacobian(model, theta, data, step: float = 1e-6) -> np.ndarray:
    """Central-difference Jacobian of the residuals, for gradient checks"""
    x = _full_values(model, theta)
    free = model.free_indices
    steps = _fd_steps(x[free], step)
    jac = np.empty((len(data.t), len(free)))
    for col, (i, h) in enumerate(zip(free, steps)):
        hi, lo = x.copy(), x.copy()
        hi[i] += h
        lo[i] -= h
        jac[:, col] = (residuals(model, hi, data) - residuals(model, lo, data)) / (2.0 * h)
    return jac


def _projected_gradient_norm(x: np.ndarray, grad: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> float:
    """Max-norm of the SSE gradient with components pushing into an active bound removed"""
    g = grad.copy()
    g[(x <= lo) & (g > 0)] = 0.0
    g[(x >= hi) & (g < 0)] = 0.0
    return float(np.max(np.abs(g))) if g.size else 0.0


def _marquardt_step(jtj: np.ndarray, grad: np.ndarray, damping: float) -> np.ndarray:
    diag = np.diag(jtj).copy()
    floor = 1e-12 * max(float(diag.max()), np.finfo(float).tiny)
    diag = np.maximum(diag, floor)
    return np.linalg.solve(jtj + damping * np.diag(diag), -grad)


def lm_fit(model, start, data, opts: LMOptions = None) -> FitResult:
    """
    Damped least squares from one start point, with box bounds enforced by
    projecting trial points onto the box. Only steps that lower the SSE are
    accepted.
    """
    opts = opts or LMOptions()
    start_pv = ParamVector.for_model(model, _full_values(model, start))
    x = start_pv.as_array()
    free = model.free_indices
    lo = model.lower[free]
    hi = model.upper[free]

    r = residuals(model, x, data)
    f = float(np.dot(r, r))
    start_sse = f
    evaluations = 1
    gnorm = math.nan
    damping = opts.initial_damping
    converged = False
    message = 'maximum iterations reached'
    iterations = opts.max_iterations

    if not free:
        converged, message, iterations = True, 'no free parameters', 0

    for iteration in range(1, opts.max_iterations + 1):
        if converged:
            break
        if f == 0.0:
            converged, message, iterations = True, 'exact fit', iteration - 1
            break

        jac = forward_jacobian(model, x, data, r0=r, step=opts.fd_step)
        evaluations += len(free)
        half_grad = jac.T @ r
        gnorm = _projected_gradient_norm(x[free], 2.0 * half_grad, lo, hi)
        if gnorm < opts.gradient_tolerance:
            converged, message, iterations = True, 'projected gradient below tolerance', iteration - 1
            break

        jtj = jac.T @ jac
        accepted = False
        decrease = 0.0
        while damping <= opts.max_damping:
            try:
                delta = _marquardt_step(jtj, half_grad, damping)
            except np.linalg.LinAlgError:
                damping *= 10.0
                continue
            trial = x.copy()
            trial[free] = np.clip(x[free] + delta, lo, hi)
            if np.array_equal(trial, x):
                break
            try:
                r_trial = residuals(model, trial, data)
            except MODEL_EVALUATION_ERRORS as e:
                logger.debug("%s: rejected trial step (%s)", model.name, e)
                evaluations += 1
                damping *= 10.0
                continue
            evaluations += 1
            f_trial = float(np.dot(r_trial, r_trial))
            if f_trial < f:
                decrease = (f - f_trial) / f
                x, r, f = trial, r_trial, f_trial
                damping = max(damping / 10.0, 1e-15)
                accepted = True
                break
            damping *= 10.0

        if not accepted:
            converged, message, iterations = True, 'no decrease possible at current point', iteration
            break
        if decrease < opts.relative_decrease_tolerance:
            converged, message, iterations = True, 'relative SSE decrease below tolerance', iteration
            break

    logger.debug("%s: lm_fit %s after %d iterations, sse=%.6g", model.name, message, iterations, f)
    return FitResult(
        best_params=ParamVector.for_model(model, x),
        sse=f,
        residuals=r,
        iterations=iterations,
        converged=converged,
        start_point=start_pv,
        start_sse=start_sse,
        gradient_norm=gnorm,
        evaluations=evaluations,
        message=message,
    )
