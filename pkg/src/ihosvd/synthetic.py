"""Random low-multilinear-rank test tensors."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .linalg import NumericalError, economy_qr, orthonormalize
from .solvers.model import FactorModel, check_ranks
from .tensor_core import check_shape, unfold


class Family(str, Enum):
    GAUSSIAN = "gaussian"
    POWERLAW = "powerlaw"


@dataclass(frozen=True)
class GeneratorSpec:
    family: Family
    shape: tuple[int, ...]
    ranks: tuple[int, ...]
    seed: int = 0
    orthonormalize_factors: bool = True

    def __post_init__(self):
        object.__setattr__(self, "family", Family(self.family))
        object.__setattr__(self, "shape", check_shape(self.shape))
        object.__setattr__(self, "ranks", check_ranks(self.ranks, self.shape))


def _fold_into_core(core, factors):
    qrs = [economy_qr(a) for a in factors]
    for n, f in enumerate(qrs):
        core = np.moveaxis(np.tensordot(f.r, core, axes=(1, n)), 0, n)
    return FactorModel(core, [f.q for f in qrs])


def generate(spec: GeneratorSpec) -> tuple[FactorModel, np.ndarray]:
    """Draw a ground-truth model and its full tensor.

    Gaussian: core and factors i.i.d. standard normal. PowerLaw: core uniform on
    [0, 1), factors ``orth(randn) @ diag(i**-0.5)``. In both cases the returned
    model has orthonormal factors, the triangular QR parts folded into the core.
    """
    rng = np.random.default_rng(spec.seed)
    if spec.family is Family.GAUSSIAN:
        core = rng.standard_normal(spec.ranks)
        factors = [rng.standard_normal((m, r)) for m, r in zip(spec.shape, spec.ranks)]
    else:
        core = rng.random(spec.ranks)
        factors = [
            orthonormalize(rng.standard_normal((m, r))) * np.arange(1, r + 1) ** -0.5
            for m, r in zip(spec.shape, spec.ranks)
        ]
    if spec.orthonormalize_factors:
        model = _fold_into_core(core, factors)
    else:
        model = FactorModel(core, factors)
    if spec.family is Family.GAUSSIAN:
        _check_generic_rank(core, spec.ranks)
    return model, model.reconstruct()


def _check_generic_rank(core: np.ndarray, ranks) -> None:
    # factors have full column rank, so the unfolding ranks are those of the core
    for n, r in enumerate(ranks):
        s = np.linalg.svd(unfold(core, n), compute_uv=False)
        if np.sum(s > 1e-8 * s[0]) != r:
            raise NumericalError(f"degenerate draw: mode-{n} rank below {r}")


def add_noise(t: np.ndarray, sigma: float, seed) -> np.ndarray:
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    if sigma == 0:
        return t
    rng = np.random.default_rng(seed)
    return t + sigma * rng.standard_normal(t.shape)
