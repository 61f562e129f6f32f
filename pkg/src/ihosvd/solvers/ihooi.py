"""Incomplete higher-order orthogonality iteration and its complete-data case."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..linalg import leading_left_singular_vectors, svd
from ..observation import LinearMeasurement, ObservationMask
from ..tensor_core import fro_norm, mode_product, product_all, unfold
from .common import Callback, initial_model, observed_tensor, run, validate_config
from .model import Fixed, FactorModel, SolveResult, SolverConfig, TraceRow, check_ranks


def leading_subspace(g: np.ndarray, r: int) -> tuple[np.ndarray, float]:
    """Leading ``r``-dimensional left singular subspace, padded when ``g`` has fewer columns.

    Past the column count every orthonormal completion maximizes ``||A^T g||``;
    the completion from the full SVD is used.
    """
    rows, cols = g.shape
    if r <= cols:
        return leading_left_singular_vectors(g, r)
    u, _, _ = np.linalg.svd(g, full_matrices=True)
    res = svd(g)
    return np.column_stack([res.u, u[:, cols:r]]), 0.0


def factor_sweep(x: np.ndarray, factors: Sequence[np.ndarray]):
    """One pass of leading-subspace updates over all modes.

    Returns the new factors, the gap ratio of each ``G_n``, the per-mode gain
    ``||A_new^T G_n||^2 - ||A_old^T G_n||^2``, and ``x x_i A_new_i^T``.
    """
    new = list(factors)
    gaps, gains = [], []
    last = len(factors) - 1
    w = None
    for n, a_old in enumerate(factors):
        w = product_all(x, new, transpose=True, skip=n)
        g = unfold(w, n)
        a, gap = leading_subspace(g, a_old.shape[1])
        gains.append(fro_norm(a.T @ g) ** 2 - fro_norm(a_old.T @ g) ** 2)
        gaps.append(gap)
        new[n] = a
    core = mode_product(w, new[last].T, last)
    return new, tuple(gaps), tuple(gains), core


def _row(x_new, x_old, factors, mask, gaps, gains):
    core = product_all(x_new, factors, transpose=True)
    resid = product_all(core, factors) - x_new
    row = TraceRow(
        iteration=0,
        fit=fro_norm(mask.project(resid)),
        obj=0.5 * fro_norm(resid) ** 2,
        rel_change=0.0,
        gap_ratios=gaps,
        step_norm=fro_norm(x_new - x_old),
        ranks=tuple(a.shape[1] for a in factors),
        unobserved_norm=fro_norm(mask.project_complement(x_new)),
        mode_gains=gains,
    )
    return core, row


def ihooi_iterate(
    factors: Sequence[np.ndarray], x: np.ndarray, mask: ObservationMask
) -> tuple[FactorModel, np.ndarray, TraceRow]:
    """One iHOOI sweep from a feasible ``(factors, x)``.

    Factors are replaced in turn by the leading left singular vectors of
    ``G_n``, then the unobserved entries of ``x`` are overwritten by those of its
    projection onto the new factor subspaces. The returned model's core is
    ``x_new x_i A_i^T``.
    """
    new, gaps, gains, core_x = factor_sweep(x, factors)
    x_new = np.where(mask.as_bool, x, product_all(core_x, new))
    core, row = _row(x_new, x, new, mask, gaps, gains)
    return FactorModel(core, new), x_new, row


def generalized_x_update(
    x_hat: np.ndarray,
    factors: Sequence[np.ndarray],
    op: LinearMeasurement,
    measured: np.ndarray,
) -> np.ndarray:
    """Closest tensor to ``x_hat x_i A_i A_i^T`` that reproduces the measurements."""
    z = product_all(product_all(x_hat, factors, transpose=True), factors)
    return op.correct(z, np.asarray(measured, dtype=np.float64))


def ihooi_iterate_measured(
    factors: Sequence[np.ndarray],
    x: np.ndarray,
    op: LinearMeasurement,
    measured: np.ndarray,
) -> tuple[FactorModel, np.ndarray, TraceRow]:
    """iHOOI sweep for general linear measurements ``op(x) = measured``."""
    new, gaps, gains, core_x = factor_sweep(x, factors)
    x_new = op.correct(product_all(core_x, new), np.asarray(measured, dtype=np.float64))
    core = product_all(x_new, new, transpose=True)
    proj = product_all(core, new)
    row = TraceRow(
        iteration=0,
        fit=float(np.linalg.norm(op.apply(proj) - measured)),
        obj=0.5 * fro_norm(proj - x_new) ** 2,
        rel_change=0.0,
        gap_ratios=gaps,
        step_norm=fro_norm(x_new - x),
        ranks=tuple(a.shape[1] for a in new),
        mode_gains=gains,
    )
    return FactorModel(core, new), x_new, row


def _ihooi_step(mask):
    def step(model, x):
        return ihooi_iterate(model.factors, x, mask)

    return step


def ihooi_solve(
    mask: ObservationMask,
    values,
    config: SolverConfig,
    init_factors: Sequence[np.ndarray] | None = None,
    callback: Callback | None = None,
) -> SolveResult:
    """Run iHOOI on the observations ``values`` (vector on the mask, or a full tensor).

    Starts from random orthonormal factors (drawn from ``config.seed``) unless
    ``init_factors`` is given, with unobserved entries of ``x`` set to zero.
    """
    if len(mask) == 0:
        raise ValueError("no observed entries")
    validate_config(config, mask)
    rng = np.random.default_rng(config.seed)
    x0 = observed_tensor(mask, values)
    model = initial_model(mask, x0, config, rng, init_factors)
    return run(_ihooi_step(mask), model, x0, mask, config, rng, callback)


def truncated_hosvd(t: np.ndarray, ranks: Sequence[int]) -> FactorModel:
    ranks = check_ranks(ranks, t.shape)
    factors = [leading_subspace(unfold(t, n), r)[0] for n, r in enumerate(ranks)]
    return FactorModel(product_all(t, factors, transpose=True), factors)


def hooi_solve(
    t: np.ndarray,
    ranks: Sequence[int],
    config: SolverConfig | None = None,
    init_factors: Sequence[np.ndarray] | None = None,
    callback: Callback | None = None,
) -> SolveResult:
    """Best rank-``ranks`` approximation of a complete tensor by HOOI.

    iHOOI with every entry observed, started from the truncated HOSVD unless
    ``init_factors`` is given.
    """
    t = np.asarray(t, dtype=np.float64)
    ranks = check_ranks(ranks, t.shape)
    if config is None:
        config = SolverConfig(Fixed(ranks), tol=1e-10, max_iters=500)
    mask = ObservationMask.full(t.shape)
    if init_factors is None:
        init_factors = truncated_hosvd(t, ranks).factors
    return ihooi_solve(mask, t, config, init_factors=init_factors, callback=callback)
