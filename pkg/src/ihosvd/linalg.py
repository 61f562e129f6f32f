"""Dense factorizations used by the solvers.

LAPACK (through numpy) does the heavy lifting; this module fixes sign
conventions so results are reproducible, and adds the truncated subspace and
pseudo-inverse helpers the solvers need.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PINV_RTOL = 1e-12


class NumericalError(ArithmeticError):
    """Raised when a factorization receives non-finite data or fails."""


@dataclass(frozen=True)
class SvdResult:
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray


@dataclass(frozen=True)
class QrResult:
    q: np.ndarray
    r: np.ndarray


def _require_finite(m: np.ndarray) -> None:
    if not np.all(np.isfinite(m)):
        raise NumericalError("matrix contains non-finite entries")


def _fix_signs(u: np.ndarray, v: np.ndarray | None = None):
    # largest-magnitude entry of every left singular vector made nonnegative
    if u.size == 0:
        return u, v
    idx = np.argmax(np.abs(u), axis=0)
    signs = np.sign(u[idx, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    u = u * signs
    if v is not None:
        v = v * signs
    return u, v


def svd(m: np.ndarray) -> SvdResult:
    """Compact SVD ``m = u @ diag(s) @ v.T`` with a deterministic sign convention."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("svd expects a matrix")
    _require_finite(m)
    try:
        u, s, vt = np.linalg.svd(m, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(str(exc)) from exc
    u, v = _fix_signs(u, vt.T)
    return SvdResult(u, s, v)


def gap_ratio(s: np.ndarray, r: int) -> float:
    """``s[r] / s[r-1]`` (1-based: sigma_{r+1}/sigma_r) with 0/0 = 0 and sigma_{r+1} = 0 past the end."""
    below = s[r] if r < len(s) else 0.0
    above = s[r - 1]
    if above == 0.0:
        return 0.0 if below == 0.0 else np.inf
    return float(below / above)


def leading_left_singular_vectors(
    m: np.ndarray, r: int, gram_factor: float = 4.0
) -> tuple[np.ndarray, float]:
    """Top-``r`` left singular subspace of ``m`` and the gap ratio sigma_{r+1}/sigma_r.

    When ``m`` is much wider than tall (``cols > gram_factor * rows``) the
    eigendecomposition of ``m @ m.T`` is used instead of a full SVD.
    """
    m = np.asarray(m, dtype=np.float64)
    rows, cols = m.shape
    if not 1 <= r <= min(rows, cols):
        raise ValueError(f"rank {r} out of range for a {rows}x{cols} matrix")
    if cols > gram_factor * rows:
        _require_finite(m)
        w, vecs = np.linalg.eigh(m @ m.T)
        order = np.argsort(w)[::-1]
        s = np.sqrt(np.clip(w[order], 0.0, None))
        u, _ = _fix_signs(vecs[:, order[:r]])
    else:
        res = svd(m)
        u, s = res.u[:, :r], res.s
    return u, gap_ratio(s, r)


def economy_qr(m: np.ndarray) -> QrResult:
    """Economy QR with a nonnegative diagonal in ``r``."""
    m = np.asarray(m, dtype=np.float64)
    rows, cols = m.shape
    if rows < cols:
        raise ValueError(f"economy QR needs rows >= cols, got {m.shape}")
    _require_finite(m)
    q, r = np.linalg.qr(m, mode="reduced")
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return QrResult(q * signs, r * signs[:, None])


def pinv(m: np.ndarray, rtol: float = PINV_RTOL) -> np.ndarray:
    """Pseudo-inverse via SVD, dropping singular values below ``rtol * s[0]``."""
    res = svd(m)
    if res.s.size == 0 or res.s[0] == 0.0:
        return np.zeros(m.shape[::-1])
    keep = res.s > rtol * res.s[0]
    return (res.v[:, keep] / res.s[keep]) @ res.u[:, keep].T


def lsq_via_pinv(x_n: np.ndarray, b_n: np.ndarray, rtol: float = PINV_RTOL) -> np.ndarray:
    """Minimum-norm solution of ``min_A ||A b_n - x_n||_F``, i.e. ``x_n b_n^T (b_n b_n^T)^+``."""
    x_n = np.asarray(x_n, dtype=np.float64)
    b_n = np.asarray(b_n, dtype=np.float64)
    if x_n.shape[1] != b_n.shape[1]:
        raise ValueError(f"column mismatch: {x_n.shape} vs {b_n.shape}")
    return lsq_from_products(x_n @ b_n.T, b_n @ b_n.T, rtol)


def lsq_from_products(xbt: np.ndarray, bbt: np.ndarray, rtol: float = PINV_RTOL) -> np.ndarray:
    """Same solution as :func:`lsq_via_pinv` given ``x_n b_n^T`` and ``b_n b_n^T`` directly."""
    return xbt @ pinv(bbt, rtol)


def orthonormalize(m: np.ndarray) -> np.ndarray:
    return economy_qr(m).q
