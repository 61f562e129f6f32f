"""Objective values, the imputation gradient, and first-order diagnostics."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from ..observation import ObservationMask
from ..tensor_core import fro_norm, product_all, unfold
from .model import FactorModel, KktResidual, check_orthonormal, orthonormality_error

FEAS_TOL = 1e-10


def projector_product(x: np.ndarray, factors: Sequence[np.ndarray]) -> np.ndarray:
    """``x x_1 A_1 A_1^T ... x_N A_N A_N^T``."""
    return product_all(product_all(x, factors, transpose=True), factors)


def objective_f(model: FactorModel, x: np.ndarray) -> float:
    """Half the squared distance between the model's reconstruction and ``x``."""
    rec = model.reconstruct()
    if rec.shape != x.shape:
        raise ValueError(f"model shape {rec.shape} does not match {x.shape}")
    return 0.5 * fro_norm(rec - x) ** 2


def objective_g(factors: Sequence[np.ndarray], x: np.ndarray) -> float:
    """Half the squared distance between ``x`` and its multilinear projection."""
    check_orthonormal(factors)
    if tuple(a.shape[0] for a in factors) != x.shape:
        raise ValueError("factor row counts do not match the tensor shape")
    return 0.5 * fro_norm(projector_product(x, factors) - x) ** 2


def objective_g_energy(factors: Sequence[np.ndarray], x: np.ndarray) -> float:
    """``objective_g`` through the energy identity ``(||x||^2 - ||x x_i A_i^T||^2) / 2``."""
    check_orthonormal(factors)
    return 0.5 * (fro_norm(x) ** 2 - fro_norm(product_all(x, factors, transpose=True)) ** 2)


def _check_feasible(x: np.ndarray, mask: ObservationMask, observed: np.ndarray | None) -> None:
    if observed is None:
        return
    gap = np.max(np.abs(mask.gather(x) - mask.gather(observed)), initial=0.0)
    if gap > FEAS_TOL * (1.0 + np.max(np.abs(observed), initial=0.0)):
        raise ValueError(f"x does not match the observed entries (max gap {gap:.3g})")


def grad_h(
    x_hat: np.ndarray,
    factors: Sequence[np.ndarray],
    mask: ObservationMask,
    observed: np.ndarray | None = None,
) -> np.ndarray:
    """Gradient of the imputation objective in the unobserved entries.

    Valid only at feasible points; pass ``observed`` (the data tensor, only its
    observed entries are read) to have feasibility checked.
    """
    check_orthonormal(factors)
    _check_feasible(x_hat, mask, observed)
    return mask.project_complement(x_hat - projector_product(x_hat, factors))


def g_matrix(x: np.ndarray, factors: Sequence[np.ndarray], n: int) -> np.ndarray:
    """Mode-n unfolding of ``x`` multiplied by ``A_i^T`` along every mode except n."""
    return unfold(product_all(x, factors, transpose=True, skip=n), n)


def kkt_residual(
    factors: Sequence[np.ndarray],
    x: np.ndarray,
    mask: ObservationMask,
    data: np.ndarray,
) -> KktResidual:
    """Residuals of the first-order optimality system at ``(factors, x)``.

    The multipliers are ``Lambda_n = A_n^T G_n G_n^T A_n`` and
    ``Y = P_Omega(x x_i A_i A_i^T) - P_Omega(data)``.
    """
    if x.shape != data.shape or x.shape != mask.shape:
        raise ValueError("x, data and mask shapes differ")
    if tuple(a.shape[0] for a in factors) != x.shape:
        raise ValueError("factor row counts do not match the tensor shape")
    lambdas, res_a = [], []
    for n, a in enumerate(factors):
        g = g_matrix(x, factors, n)
        ggt_a = g @ (g.T @ a)
        lam = a.T @ ggt_a
        lam = 0.5 * (lam + lam.T)
        lambdas.append(lam)
        res_a.append(float(np.linalg.norm(ggt_a - a @ lam)))
    proj = projector_product(x, factors)
    y = mask.project(proj - data)
    res_x = fro_norm(x - proj + y)
    res_orth = [orthonormality_error(a) for a in factors]
    res_feas = fro_norm(mask.project(x - data))
    return KktResidual(lambdas, y, res_a, res_x, res_orth, res_feas)
