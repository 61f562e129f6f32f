"""Observation sets, their projections, and linear measurement operators."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .linalg import NumericalError
from .tensor_core import check_shape, vectorize


@dataclass(frozen=True)
class ObservationMask:
    """Index set of observed entries, stored as sorted Fortran-order flat indices."""

    shape: tuple[int, ...]
    indices: np.ndarray = field(repr=False)

    def __post_init__(self):
        shape = check_shape(self.shape)
        idx = np.asarray(self.indices, dtype=np.int64).ravel()
        total = int(np.prod(shape))
        if idx.size and (idx[0] < 0 or idx[-1] >= total):
            raise ValueError("observation index out of range")
        if idx.size > 1 and np.any(np.diff(idx) <= 0):
            raise ValueError("observation indices must be strictly increasing")
        idx.setflags(write=False)
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "indices", idx)

    @classmethod
    def from_bool(cls, observed: np.ndarray) -> "ObservationMask":
        observed = np.asarray(observed, dtype=bool)
        return cls(observed.shape, np.flatnonzero(vectorize(observed)))

    @classmethod
    def full(cls, shape) -> "ObservationMask":
        return cls(tuple(shape), np.arange(int(np.prod(shape))))

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    def __len__(self) -> int:
        return int(self.indices.size)

    @property
    def sample_ratio(self) -> float:
        return len(self) / self.size

    @cached_property
    def as_bool(self) -> np.ndarray:
        flat = np.zeros(self.size, dtype=bool)
        flat[self.indices] = True
        out = flat.reshape(self.shape, order="F")
        out.setflags(write=False)
        return out

    def _check(self, t: np.ndarray) -> None:
        if t.shape != self.shape:
            raise ValueError(f"tensor shape {t.shape} does not match mask {self.shape}")

    def project(self, t: np.ndarray) -> np.ndarray:
        self._check(t)
        return np.where(self.as_bool, t, 0.0)

    def project_complement(self, t: np.ndarray) -> np.ndarray:
        self._check(t)
        return np.where(self.as_bool, 0.0, t)

    def gather(self, t: np.ndarray) -> np.ndarray:
        self._check(t)
        return vectorize(t)[self.indices]

    def scatter(self, values: np.ndarray, fill: np.ndarray | None = None) -> np.ndarray:
        """Tensor equal to ``values`` on the mask and ``fill`` (default zero) elsewhere."""
        values = np.asarray(values, dtype=np.float64)
        if values.shape != (len(self),):
            raise ValueError(f"expected {len(self)} values, got shape {values.shape}")
        if fill is None:
            flat = np.zeros(self.size)
        else:
            self._check(fill)
            flat = vectorize(fill).copy()
        flat[self.indices] = values
        return flat.reshape(self.shape, order="F")


def sample_uniform(shape, sr: float, seed) -> ObservationMask:
    """Choose ``round(sr * prod(shape))`` entries uniformly without replacement."""
    shape = check_shape(shape)
    if not 0.0 < sr <= 1.0:
        raise ValueError(f"sample ratio must lie in (0, 1], got {sr}")
    total = int(np.prod(shape))
    count = int(round(sr * total))
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    if count == total:
        return ObservationMask.full(shape)
    idx = rng.choice(total, size=count, replace=False, shuffle=False)
    return ObservationMask(shape, np.sort(idx))


class LinearMeasurement:
    """A linear map from tensors of a fixed shape to vectors.

    Subclasses provide ``apply``, ``adjoint`` and ``gram_solve`` (applying the
    inverse of ``L L*``).
    """

    shape: tuple[int, ...]

    def apply(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def adjoint(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def gram_solve(self, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def correct(self, z: np.ndarray, measured: np.ndarray) -> np.ndarray:
        """Closest tensor to ``z`` (in Frobenius norm) with ``apply(.) == measured``."""
        return z + self.adjoint(self.gram_solve(measured - self.apply(z)))


class SamplingMeasurement(LinearMeasurement):
    """Entry sampling on an observation mask; ``L L*`` is the identity."""

    def __init__(self, mask: ObservationMask):
        self.mask = mask
        self.shape = mask.shape

    def apply(self, t):
        return self.mask.gather(t)

    def adjoint(self, y):
        return self.mask.scatter(y)

    def gram_solve(self, y):
        return np.array(y, dtype=np.float64, copy=True)

    def correct(self, z, measured):
        # exact copy on the mask rather than z + (measured - z)
        return self.mask.scatter(measured, fill=z)


class DenseMeasurement(LinearMeasurement):
    """``L(x) = matrix @ vec(x)`` for an explicit ``p x prod(shape)`` matrix."""

    def __init__(self, matrix: np.ndarray, shape, max_cond: float = 1e12):
        self.shape = check_shape(shape)
        self.matrix = np.asarray(matrix, dtype=np.float64)
        if self.matrix.ndim != 2 or self.matrix.shape[1] != int(np.prod(self.shape)):
            raise ValueError("measurement matrix does not match the tensor shape")
        gram = self.matrix @ self.matrix.T
        cond = np.linalg.cond(gram)
        if not np.isfinite(cond) or cond > max_cond:
            raise NumericalError(f"L L* is ill-conditioned (cond {cond:.3g})")
        self._chol = np.linalg.cholesky(gram)

    def apply(self, t):
        if t.shape != self.shape:
            raise ValueError(f"tensor shape {t.shape} does not match operator {self.shape}")
        return self.matrix @ vectorize(t)

    def adjoint(self, y):
        return (self.matrix.T @ y).reshape(self.shape, order="F")

    def gram_solve(self, y):
        tmp = np.linalg.solve(self._chol, y)
        return np.linalg.solve(self._chol.T, tmp)


def sampling_as_measurement(mask: ObservationMask) -> SamplingMeasurement:
    return SamplingMeasurement(mask)
