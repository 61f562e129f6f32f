"""Experiment configuration files.

One ``key = value`` pair per line; ``#`` starts a comment. Lists are comma
separated. Unknown keys are rejected so typos do not silently fall back to
defaults.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

from .solvers.model import Fixed, Increasing, SolverConfig
from .synthetic import Family, GeneratorSpec


class ConfigError(ValueError):
    pass


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {s!r}")


def _ints(s: str) -> tuple[int, ...]:
    return tuple(int(v) for v in s.split(",") if v.strip())


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(v) for v in s.split(",") if v.strip())


def _float(s: str) -> float:
    return math.inf if s.strip().lower() in ("inf", "none") else float(s)


KINDS = ("convergence", "phase", "recover", "complete")
SOLVERS = ("ihooi", "alsas", "both", "hooi")


@dataclass
class ExperimentConfig:
    kind: str = "convergence"
    family: str = "gaussian"
    shape: tuple[int, ...] = (10, 10, 10)
    ranks: tuple[int, ...] = (2, 2, 2)
    sr: float = 0.5
    noise: float = 0.0
    solver: str = "both"
    rank_strategy: str = "fixed"
    rank_start: tuple[int, ...] = (1,)
    rank_max: tuple[int, ...] = ()
    rank_delta: int = 1
    fit_stall: float = 1e-2
    tol: float = 1e-5
    max_iters: int = 2000
    max_seconds: float = math.inf
    seed: int = 0
    rank_grid: tuple[int, ...] = ()
    sr_grid: tuple[float, ...] = ()
    trials: int = 10
    threshold: float = 1e-2
    early_exit: bool = False
    inject_truth: bool = False
    threads: int = 1
    out: str = "results"

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise ConfigError(f"unknown experiment kind {self.kind!r}")
        if self.solver not in SOLVERS:
            raise ConfigError(f"unknown solver {self.solver!r}")
        if self.rank_strategy not in ("fixed", "increasing"):
            raise ConfigError(f"unknown rank strategy {self.rank_strategy!r}")
        try:
            Family(self.family)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.trials < 1 or self.threads < 1:
            raise ConfigError("trials and threads must be at least 1")
        if self.kind in ("phase", "recover") and not (self.rank_grid and self.sr_grid):
            raise ConfigError(f"{self.kind} experiments need nonempty rank_grid and sr_grid")
        for sr in (self.sr, *self.sr_grid):
            if not 0 < sr <= 1:
                raise ConfigError(f"sample ratio {sr} outside (0, 1]")
        if self.max_iters < 0 or not self.tol > 0 or self.noise < 0:
            raise ConfigError("max_iters, tol and noise must be nonnegative (tol positive)")
        if self.solver == "hooi" and self.kind in ("phase", "recover"):
            raise ConfigError("hooi needs complete data; use it with convergence or complete")

    def generator(self, seed: int, ranks: tuple[int, ...] | None = None) -> GeneratorSpec:
        ranks = self.ranks if ranks is None else ranks
        if len(ranks) == 1:
            ranks = ranks * len(self.shape)
        try:
            return GeneratorSpec(self.family, self.shape, tuple(ranks), seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    def expand(self, values: tuple[int, ...]) -> tuple[int, ...]:
        return values * len(self.shape) if len(values) == 1 else values

    def solver_config(self, true_ranks: tuple[int, ...], seed: int) -> SolverConfig:
        true_ranks = self.expand(tuple(true_ranks))
        if self.rank_strategy == "fixed":
            strategy = Fixed(true_ranks)
        else:
            rmax = self.expand(self.rank_max) if self.rank_max else tuple(self.shape)
            strategy = Increasing(
                self.expand(self.rank_start), rmax, self.rank_delta, self.fit_stall
            )
        try:
            return SolverConfig(strategy, self.tol, self.max_iters, self.max_seconds, seed)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None

    @property
    def solver_names(self) -> tuple[str, ...]:
        return ("ihooi", "alsas") if self.solver == "both" else (self.solver,)


_PARSERS = {
    "kind": str.strip,
    "family": str.strip,
    "shape": _ints,
    "ranks": _ints,
    "sr": float,
    "noise": float,
    "solver": str.strip,
    "rank_strategy": str.strip,
    "rank_start": _ints,
    "rank_max": _ints,
    "rank_delta": int,
    "fit_stall": float,
    "tol": float,
    "max_iters": int,
    "max_seconds": _float,
    "seed": int,
    "rank_grid": _ints,
    "sr_grid": _floats,
    "trials": int,
    "threshold": float,
    "early_exit": _bool,
    "inject_truth": _bool,
    "threads": int,
    "out": str.strip,
}
assert set(_PARSERS) == {f.name for f in fields(ExperimentConfig)}


def parse_pairs(pairs: dict[str, str]) -> dict:
    out = {}
    for key, raw in pairs.items():
        if key not in _PARSERS:
            raise ConfigError(f"unknown config key {key!r}")
        try:
            out[key] = _PARSERS[key](raw)
        except ValueError as exc:
            raise ConfigError(f"bad value for {key}: {raw!r} ({exc})") from None
    return out


def parse_text(text: str) -> dict[str, str]:
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        pairs[key.strip()] = value.strip()
    return pairs


def load_config(path=None, overrides: dict[str, str] | None = None, **defaults) -> ExperimentConfig:
    """Build a config from defaults, then the file at ``path``, then ``overrides``."""
    values = dict(defaults)
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        values.update(parse_pairs(parse_text(text)))
    values.update(parse_pairs(overrides or {}))
    try:
        return ExperimentConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def dump_config(cfg: ExperimentConfig) -> str:
    lines = []
    for f in fields(cfg):
        v = getattr(cfg, f.name)
        if isinstance(v, tuple):
            v = ", ".join(map(str, v))
        elif isinstance(v, bool):
            v = str(v).lower()
        lines.append(f"{f.name} = {v}")
    return "\n".join(lines) + "\n"


__all__ = ["ConfigError", "ExperimentConfig", "dump_config", "load_config", "replace"]
