"""Factor models, solver configuration, and per-iteration traces."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence, Union

import numpy as np

from ..tensor_core import product_all

ORTH_TOL = 1e-8


def check_ranks(ranks: Sequence[int], shape: Sequence[int]) -> tuple[int, ...]:
    ranks = tuple(int(r) for r in ranks)
    if len(ranks) != len(shape):
        raise ValueError(f"{len(ranks)} ranks given for a {len(shape)}-way tensor")
    for r, m in zip(ranks, shape):
        if not 1 <= r <= m:
            raise ValueError(f"rank {r} outside [1, {m}]")
    return ranks


def orthonormality_error(a: np.ndarray) -> float:
    return float(np.linalg.norm(a.T @ a - np.eye(a.shape[1])))


def check_orthonormal(factors: Sequence[np.ndarray], tol: float = ORTH_TOL) -> None:
    for n, a in enumerate(factors):
        err = orthonormality_error(a)
        if err > tol:
            raise ValueError(f"factor {n} is not orthonormal (||A^T A - I|| = {err:.3g})")


@dataclass
class FactorModel:
    """``core x_1 A_1 ... x_N A_N`` with orthonormal factor matrices."""

    core: np.ndarray
    factors: list[np.ndarray]

    def __post_init__(self):
        self.core = np.asarray(self.core, dtype=np.float64)
        self.factors = [np.asarray(a, dtype=np.float64) for a in self.factors]
        if self.core.ndim != len(self.factors):
            raise ValueError("core order and number of factors differ")
        for n, a in enumerate(self.factors):
            if a.ndim != 2 or a.shape[1] != self.core.shape[n]:
                raise ValueError(f"factor {n} of shape {a.shape} does not match the core")

    @property
    def ranks(self) -> tuple[int, ...]:
        return tuple(a.shape[1] for a in self.factors)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.shape[0] for a in self.factors)

    def reconstruct(self) -> np.ndarray:
        return product_all(self.core, self.factors)

    def copy(self) -> "FactorModel":
        return FactorModel(self.core.copy(), [a.copy() for a in self.factors])


@dataclass(frozen=True)
class Fixed:
    ranks: tuple[int, ...]


@dataclass(frozen=True)
class Increasing:
    start: tuple[int, ...]
    max: tuple[int, ...]
    delta: int = 1
    fit_stall_threshold: float = 1e-2

    def __post_init__(self):
        if len(self.start) != len(self.max):
            raise ValueError("start and max ranks differ in length")
        if any(s > m for s, m in zip(self.start, self.max)):
            raise ValueError("start ranks must not exceed max ranks")
        if self.delta < 1 or self.fit_stall_threshold <= 0:
            raise ValueError("delta and fit_stall_threshold must be positive")


RankStrategy = Union[Fixed, Increasing]


@dataclass
class SolverConfig:
    rank_strategy: RankStrategy
    tol: float = 1e-5
    max_iters: int = 2000
    max_seconds: float = math.inf
    seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 0:
            raise ValueError("max_iters must be nonnegative")
        if not self.max_seconds > 0:
            raise ValueError("max_seconds must be positive")

    @property
    def initial_ranks(self) -> tuple[int, ...]:
        s = self.rank_strategy
        return tuple(s.ranks if isinstance(s, Fixed) else s.start)


@dataclass
class TraceRow:
    iteration: int
    fit: float
    obj: float
    rel_change: float
    gap_ratios: tuple[float, ...]
    step_norm: float
    ranks: tuple[int, ...]
    wall_time: float = 0.0
    unobserved_norm: float = 0.0
    mode_gains: tuple[float, ...] = ()


@dataclass
class IterationTrace:
    initial_fit: float = math.nan
    initial_obj: float = math.nan
    observed_norm: float = math.nan
    rows: list[TraceRow] = field(default_factory=list)
    stop_reason: str = ""
    rank_increases: list[tuple[int, int]] = field(default_factory=list)

    def __len__(self):
        return len(self.rows)

    def __iter__(self):
        return iter(self.rows)

    def __getitem__(self, i):
        return self.rows[i]

    def append(self, row: TraceRow) -> None:
        self.rows.append(row)

    @property
    def fits(self) -> np.ndarray:
        return np.array([self.initial_fit] + [r.fit for r in self.rows])

    @property
    def objectives(self) -> np.ndarray:
        return np.array([self.initial_obj] + [r.obj for r in self.rows])

    @property
    def max_gap_ratio(self) -> float:
        ratios = [g for r in self.rows for g in r.gap_ratios]
        return max(ratios) if ratios else math.nan


@dataclass
class KktResidual:
    lambdas: list[np.ndarray]
    y: np.ndarray
    res_a: list[float]
    res_x: float
    res_orth: list[float]
    res_feas: float


class SolveResult(NamedTuple):
    model: FactorModel
    x: np.ndarray
    trace: IterationTrace
