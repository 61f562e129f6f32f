"""Rank-increasing heuristic shared by both solvers."""
from __future__ import annotations

import numpy as np

from .model import FactorModel, Increasing


def augment_mode(model: FactorModel, n: int, count: int, rng: np.random.Generator) -> FactorModel:
    """Append ``count`` random orthonormalized columns to factor ``n``.

    The core gains matching zero slices, so the reconstruction is unchanged.
    """
    a = model.factors[n]
    for _ in range(count):
        v = rng.standard_normal(a.shape[0])
        for _ in range(2):  # reorthogonalize once for stability
            v = v - a @ (a.T @ v)
        v /= np.linalg.norm(v)
        a = np.column_stack([a, v])
    pad = [(0, 0)] * model.core.ndim
    pad[n] = (0, count)
    factors = list(model.factors)
    factors[n] = a
    return FactorModel(np.pad(model.core, pad), factors)


def stalled(fit_prev: float, fit_curr: float, threshold: float) -> bool:
    if fit_prev == 0.0:
        return True
    return abs(1.0 - fit_curr / fit_prev) <= threshold


def maybe_increase_rank(
    fit_prev: float,
    fit_curr: float,
    strategy: Increasing,
    model: FactorModel,
    rng: np.random.Generator,
) -> tuple[FactorModel, int | None]:
    """Grow one mode's rank when the fit has stalled.

    Returns the (possibly augmented) model and the enlarged mode, or ``None``
    when nothing changed. The mode with the most headroom is chosen, ties going
    to the lowest index.
    """
    if not stalled(fit_prev, fit_curr, strategy.fit_stall_threshold):
        return model, None
    ranks = model.ranks
    headroom = [rmax - r for r, rmax in zip(ranks, strategy.max)]
    n0 = int(np.argmax(headroom))
    if headroom[n0] <= 0:
        return model, None
    new_rank = min(ranks[n0] + strategy.delta, strategy.max[n0], model.shape[n0])
    if new_rank == ranks[n0]:
        return model, None
    return augment_mode(model, n0, new_rank - ranks[n0], rng), n0
