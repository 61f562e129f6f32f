"""Outer loop shared by the solvers: initialization, stopping, rank growth."""
from __future__ import annotations

import time
import warnings
from typing import Callable, Sequence

import numpy as np

from ..linalg import orthonormalize
from ..observation import ObservationMask
from ..tensor_core import fro_norm, product_all
from .model import (
    FactorModel,
    Fixed,
    Increasing,
    IterationTrace,
    SolveResult,
    SolverConfig,
    TraceRow,
    check_orthonormal,
    check_ranks,
)
from .rank import maybe_increase_rank

Step = Callable[[FactorModel, np.ndarray], tuple[FactorModel, np.ndarray, TraceRow]]
Callback = Callable[[int, FactorModel, np.ndarray, TraceRow], None]


class OverfittingWarning(UserWarning):
    pass


def observed_tensor(mask: ObservationMask, values) -> np.ndarray:
    """Zero-filled tensor holding the observations; ``values`` is a vector or a full tensor."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape == mask.shape:
        return mask.project(values)
    return mask.scatter(values)


def random_factors(shape, ranks, rng: np.random.Generator) -> list[np.ndarray]:
    return [orthonormalize(rng.standard_normal((m, r))) for m, r in zip(shape, ranks)]


def validate_config(config: SolverConfig, mask: ObservationMask) -> None:
    shape = mask.shape
    strategy = config.rank_strategy
    if isinstance(strategy, Fixed):
        ranks = check_ranks(strategy.ranks, shape)
        if ranks == shape and len(mask) < mask.size:
            warnings.warn(
                "full ranks with missing data reproduce the zero-filled input",
                OverfittingWarning,
                stacklevel=3,
            )
    elif isinstance(strategy, Increasing):
        check_ranks(strategy.start, shape)
        check_ranks(strategy.max, shape)
    else:
        raise TypeError(f"unknown rank strategy {strategy!r}")


def initial_model(
    mask: ObservationMask,
    x0: np.ndarray,
    config: SolverConfig,
    rng: np.random.Generator,
    init_factors: Sequence[np.ndarray] | None,
) -> FactorModel:
    if init_factors is None:
        factors = random_factors(mask.shape, config.initial_ranks, rng)
    else:
        factors = [np.array(a, dtype=np.float64) for a in init_factors]
        check_orthonormal(factors)
        check_ranks([a.shape[1] for a in factors], mask.shape)
    return FactorModel(product_all(x0, factors, transpose=True), factors)


def run(
    step: Step,
    model: FactorModel,
    x: np.ndarray,
    mask: ObservationMask,
    config: SolverConfig,
    rng: np.random.Generator,
    callback: Callback | None = None,
) -> SolveResult:
    rec = model.reconstruct()
    trace = IterationTrace(
        initial_fit=fro_norm(mask.project(rec - x)),
        initial_obj=0.5 * fro_norm(rec - x) ** 2,
        observed_norm=fro_norm(mask.project(x)),
    )
    strategy = config.rank_strategy
    fit_prev, obj_prev = trace.initial_fit, trace.initial_obj
    start = time.perf_counter()
    trace.stop_reason = "max_iters"
    for k in range(config.max_iters):
        if time.perf_counter() - start > config.max_seconds:
            trace.stop_reason = "max_seconds"
            break
        model, x, row = step(model, x)
        row.iteration = k + 1
        row.rel_change = abs(row.obj - obj_prev) / (1.0 + obj_prev)
        row.wall_time = time.perf_counter() - start
        trace.append(row)
        if callback is not None:
            callback(k + 1, model, x, row)
        if row.fit <= config.tol * trace.observed_norm:
            trace.stop_reason = "fit"
            break
        if row.rel_change <= config.tol:
            trace.stop_reason = "objective"
            break
        if isinstance(strategy, Increasing):
            model, mode = maybe_increase_rank(fit_prev, row.fit, strategy, model, rng)
            if mode is not None:
                trace.rank_increases.append((k + 1, mode))
        fit_prev, obj_prev = row.fit, row.obj
    return SolveResult(model, x, trace)
