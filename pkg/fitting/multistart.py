"""
Multi-start Least Squares
Seeded Latin-hypercube start points, independent local fits, deterministic reduction
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import List, Optional, Tuple

import numpy as np
from scipy.stats import qmc

from config import FractionalConfig
from core.errors import DomainError, FitError, FractionalEngineError
from fitting.lm_solver import LMOptions, lm_fit
from fitting.results import FitResult, ParamVector
from models.registry import get_model

logger = logging.getLogger(__name__)


def _lhs_sampler(dimension: int, seed: int) -> qmc.LatinHypercube:
    rng = np.random.default_rng(seed)
    try:
        return qmc.LatinHypercube(d=dimension, rng=rng)
    except TypeError:
        # scipy < 1.15 spells the generator argument `seed`
        return qmc.LatinHypercube(d=dimension, seed=rng)


def latin_hypercube_starts(model, n_starts: int, seed: int) -> List[ParamVector]:
    """n_starts points spread over the free parameters' start boxes"""
    if n_starts < 1:
        raise DomainError(f"n_starts must be at least 1, got {n_starts}")
    free = model.free_indices
    base = np.array([p.fixed_value if p.fixed else p.start_box[0] for p in model.params], dtype=float)
    if not free:
        return [ParamVector.for_model(model, base) for _ in range(n_starts)]

    boxes = np.array([model.params[i].start_box for i in free], dtype=float)
    unit = _lhs_sampler(len(free), seed).random(n_starts)
    points = qmc.scale(unit, boxes[:, 0], boxes[:, 1])
    starts = []
    for row in points:
        values = base.copy()
        values[free] = row
        starts.append(ParamVector.for_model(model, values))
    return starts


def classical_seeded_start(
    model,
    data,
    seed: int = FractionalConfig.DEFAULT_SEED,
    opts: LMOptions = None,
    max_workers: Optional[int] = None,
) -> ParamVector:
    """
    Default start of a single-start fractional fit: the classical counterpart is
    fitted first and its parameters are carried over with every order set to
    DEFAULT_START_ORDER.
    """
    if model.classical is None:
        raise DomainError(f"{model.name} has no classical counterpart to start from")
    classical = get_model(model.classical, model.series_cfg)
    shared = {p.name: (p.lower, p.upper) for p in model.params if not p.fixed and p.name in classical.param_names}
    if shared:
        classical = classical.with_bounds(shared)
    baseline = multistart_fit(classical, data, FractionalConfig.DEFAULT_STARTS, seed, opts, max_workers)
    values = model.from_classical(baseline.best_params.as_array(), FractionalConfig.DEFAULT_START_ORDER)
    logger.info("%s: single start seeded from %s (sse %.6g)", model.name, classical.name, baseline.sse)
    return ParamVector.for_model(model, np.clip(values, model.lower, model.upper))


def multistart_fit(
    model,
    data,
    n_starts: int = FractionalConfig.DEFAULT_STARTS,
    seed: int = FractionalConfig.DEFAULT_SEED,
    opts: LMOptions = None,
    max_workers: Optional[int] = None,
) -> FitResult:
    """
    Run lm_fit from every generated start and keep the lowest SSE.

    Starts may run concurrently; ties are broken by start index so the result
    depends only on (model, data, n_starts, seed). A single start of a model
    with a classical counterpart is the classical-seeded default start.
    """
    if n_starts == 1 and model.classical is not None:
        starts = [classical_seeded_start(model, data, seed, opts, max_workers)]
    else:
        starts = latin_hypercube_starts(model, n_starts, seed)
    workers = max(1, min(max_workers or FractionalConfig.get_max_workers(), n_starts))

    def run(indexed: Tuple[int, ParamVector]):
        index, start = indexed
        try:
            return index, lm_fit(model, start, data, opts), None
        except (FractionalEngineError, ArithmeticError, np.linalg.LinAlgError) as e:
            return index, None, f"start {index}: {e}"

    logger.info("%s: multistart with %d starts (seed %d, %d workers)", model.name, n_starts, seed, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        outcomes = list(pool.map(run, enumerate(starts)))

    failures = [err for _, res, err in outcomes if res is None]
    successes = [(res.sse, index, res) for index, res, _ in outcomes if res is not None]
    if not successes:
        raise FitError(f"every start failed for {model.name}: " + "; ".join(failures))

    best_sse, best_index, best = min(successes, key=lambda item: (item[0], item[1]))
    logger.info(
        "%s: best sse %.6g from start %d (%d/%d starts failed)",
        model.name, best_sse, best_index, len(failures), n_starts,
    )
    return replace(best, start_index=best_index, failed_starts=failures)
