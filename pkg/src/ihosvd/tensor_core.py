"""Dense N-way tensors and multilinear algebra.

Tensors are plain ``numpy.ndarray`` objects of dtype float64. Linear indexing
follows the mode-1-fastest (Fortran) convention, so ``vectorize`` stacks the
mode-1 fibers and the mode-n unfolding orders its columns lexicographically
with the lowest remaining mode varying fastest.

Modes are 0-based throughout the package.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np


def as_tensor(data, shape: Sequence[int] | None = None) -> np.ndarray:
    """Return ``data`` as a float64 array, optionally reshaped (Fortran order)."""
    arr = np.asarray(data, dtype=np.float64)
    if shape is not None:
        shape = tuple(int(m) for m in shape)
        check_shape(shape)
        arr = arr.reshape(shape, order="F")
    if arr.ndim < 1:
        raise ValueError("tensors need at least one mode")
    return arr


def check_shape(shape: Sequence[int]) -> tuple[int, ...]:
    shape = tuple(int(m) for m in shape)
    if len(shape) < 1:
        raise ValueError("shape must have at least one mode")
    if any(m < 1 for m in shape):
        raise ValueError(f"all dimensions must be positive, got {shape}")
    return shape


def _check_mode(ndim: int, n: int) -> int:
    if not 0 <= n < ndim:
        raise IndexError(f"mode {n} out of range for a {ndim}-way tensor")
    return n


def unfold(t: np.ndarray, n: int) -> np.ndarray:
    """Mode-n matricization: an ``m_n x prod(m_i, i != n)`` matrix of fibers."""
    _check_mode(t.ndim, n)
    return np.reshape(np.moveaxis(t, n, 0), (t.shape[n], -1), order="F")


def fold(m: np.ndarray, n: int, shape: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`unfold` for a tensor of the given ``shape``."""
    shape = check_shape(shape)
    _check_mode(len(shape), n)
    m = np.asarray(m, dtype=np.float64)
    rest = int(np.prod([s for i, s in enumerate(shape) if i != n]))
    if m.shape != (shape[n], rest):
        raise ValueError(
            f"cannot fold a {m.shape} matrix along mode {n} into shape {shape}"
        )
    moved = (shape[n],) + tuple(s for i, s in enumerate(shape) if i != n)
    return np.moveaxis(np.reshape(m, moved, order="F"), 0, n)


def mode_product(t: np.ndarray, b: np.ndarray, n: int) -> np.ndarray:
    """Mode-n product ``t x_n b``; dimension n of ``t`` becomes ``b.shape[0]``."""
    _check_mode(t.ndim, n)
    b = np.asarray(b, dtype=np.float64)
    if b.ndim != 2 or b.shape[1] != t.shape[n]:
        raise ValueError(
            f"matrix of shape {b.shape} incompatible with mode {n} of size {t.shape[n]}"
        )
    shape = list(t.shape)
    shape[n] = b.shape[0]
    return fold(b @ unfold(t, n), n, shape)


def multi_mode_product(
    t: np.ndarray,
    mats: Iterable[tuple[np.ndarray, int] | tuple[np.ndarray, int, bool]],
) -> np.ndarray:
    """Apply several mode products, one matrix per mode.

    Each entry is ``(matrix, mode)`` or ``(matrix, mode, transpose)``; with the
    flag set the transpose of the matrix is applied.
    """
    items = []
    seen = set()
    for item in mats:
        if len(item) == 2:
            mat, mode = item
            transpose = False
        else:
            mat, mode, transpose = item
        if mode in seen:
            raise ValueError(f"mode {mode} appears more than once")
        seen.add(mode)
        items.append((np.asarray(mat).T if transpose else mat, mode))
    out = t
    for mat, mode in items:
        out = mode_product(out, mat, mode)
    return out


def product_all(t: np.ndarray, mats: Sequence[np.ndarray], transpose: bool = False,
                skip: int | None = None) -> np.ndarray:
    """``t x_1 M_1 ... x_N M_N`` (optionally with transposes, optionally skipping a mode)."""
    return multi_mode_product(
        t, [(m, i, transpose) for i, m in enumerate(mats) if i != skip]
    )


def vectorize(t: np.ndarray) -> np.ndarray:
    """Stack the mode-1 fibers into a vector (a view when ``t`` is Fortran-contiguous)."""
    return np.ravel(t, order="F")


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.kron(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64))


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    """``mats[0] ⊗ mats[1] ⊗ ...``; callers pass the reversed factor list for eq. vec order."""
    out = np.ones((1, 1))
    for m in mats:
        out = kron(out, m)
    return out


def inner(t: np.ndarray, s: np.ndarray) -> float:
    if t.shape != s.shape:
        raise ValueError(f"shape mismatch: {t.shape} vs {s.shape}")
    return float(np.dot(vectorize(t), vectorize(s)))


def fro_norm(t: np.ndarray) -> float:
    return float(np.sqrt(max(inner(t, t), 0.0)))
