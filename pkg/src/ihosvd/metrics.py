"""Recovery quality measures."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .solvers.model import FactorModel, check_orthonormal
from .tensor_core import fro_norm

SUCCESS_THRESHOLD = 1e-2


def relative_error(rec: np.ndarray, truth: np.ndarray) -> float:
    if rec.shape != truth.shape:
        raise ValueError(f"shape mismatch: {rec.shape} vs {truth.shape}")
    denom = fro_norm(truth)
    if denom == 0.0:
        raise ValueError("relative error undefined for a zero reference tensor")
    return fro_norm(rec - truth) / denom


def subspace_errors(truth: FactorModel, est: FactorModel) -> list[float]:
    """``(sqrt(r_n) - ||A_n^T Ahat_n||_F) / sqrt(r_n)`` for every mode."""
    out = []
    for a, ahat in zip(truth.factors, est.factors):
        r = a.shape[1]
        out.append((np.sqrt(r) - np.linalg.norm(a.T @ ahat)) / np.sqrt(r))
    return out


@dataclass
class RecoveryReport:
    relerr: float
    factor_err: float
    per_mode_subspace_err: list[float]
    success: bool


def recovery_report(
    truth: FactorModel, est: FactorModel, threshold: float = SUCCESS_THRESHOLD
) -> RecoveryReport:
    if truth.ranks != est.ranks:
        raise ValueError(f"rank mismatch: {truth.ranks} vs {est.ranks}")
    check_orthonormal(truth.factors)
    check_orthonormal(est.factors)
    relerr = relative_error(est.reconstruct(), truth.reconstruct())
    sub = subspace_errors(truth, est)
    err = relerr + float(sum(sub))
    return RecoveryReport(relerr, err, sub, success(err, threshold))


def factor_recovery_error(truth: FactorModel, est: FactorModel) -> float:
    """Reconstruction error plus the summed per-mode subspace misalignment."""
    return recovery_report(truth, est).factor_err


def success(err: float, threshold: float = SUCCESS_THRESHOLD) -> bool:
    return bool(err <= threshold)
