"""Alternating least squares with QR normalization for incomplete HOSVD."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..linalg import economy_qr, lsq_from_products
from ..observation import ObservationMask
from ..tensor_core import fro_norm, product_all, unfold
from .common import Callback, initial_model, observed_tensor, run, validate_config
from .model import FactorModel, SolveResult, SolverConfig, TraceRow


def core_update(x: np.ndarray, factors: Sequence[np.ndarray]) -> np.ndarray:
    """Least-squares core for orthonormal factors: ``x x_i A_i^T``."""
    return product_all(x, factors, transpose=True)


def factor_update(x: np.ndarray, core: np.ndarray, factors: Sequence[np.ndarray], n: int) -> np.ndarray:
    """Minimum-norm least-squares factor ``n`` with the other factors and core fixed.

    Forms ``X_(n) B_n^T`` and ``B_n B_n^T`` without building ``B_n`` itself.
    """
    c_n = unfold(core, n)
    w = product_all(x, factors, transpose=True, skip=n)
    grams = [a.T @ a for a in factors]
    s = product_all(core, grams, skip=n)
    return lsq_from_products(unfold(w, n) @ c_n.T, unfold(s, n) @ c_n.T)


def normalize(core: np.ndarray, factors: Sequence[np.ndarray]) -> FactorModel:
    """Replace each factor by its QR ``Q`` and fold the ``R`` factors into the core."""
    qrs = [economy_qr(a) for a in factors]
    return FactorModel(product_all(core, [f.r for f in qrs]), [f.q for f in qrs])


def alsas_iterate(
    model: FactorModel, x: np.ndarray, mask: ObservationMask
) -> tuple[FactorModel, np.ndarray, TraceRow]:
    """One ALSaS cycle: core, each factor, normalization, then imputation."""
    core = core_update(x, model.factors)
    factors = list(model.factors)
    for n in range(len(factors)):
        factors[n] = factor_update(x, core, factors, n)
    new = normalize(core, factors)
    rec = new.reconstruct()
    x_new = np.where(mask.as_bool, x, rec)
    resid = mask.project(rec - x_new)
    fit = fro_norm(resid)
    row = TraceRow(
        iteration=0,
        fit=fit,
        obj=0.5 * fit**2,
        rel_change=0.0,
        gap_ratios=(),
        step_norm=fro_norm(x_new - x),
        ranks=new.ranks,
        unobserved_norm=fro_norm(mask.project_complement(x_new)),
    )
    return new, x_new, row


def alsas_solve(
    mask: ObservationMask,
    values,
    config: SolverConfig,
    init_factors: Sequence[np.ndarray] | None = None,
    callback: Callback | None = None,
) -> SolveResult:
    """Run ALSaS; same inputs and starting point convention as :func:`ihooi_solve`."""
    if len(mask) == 0:
        raise ValueError("no observed entries")
    validate_config(config, mask)
    rng = np.random.default_rng(config.seed)
    x0 = observed_tensor(mask, values)
    model = initial_model(mask, x0, config, rng, init_factors)

    def step(m, x):
        return alsas_iterate(m, x, mask)

    return run(step, model, x0, mask, config, rng, callback)
