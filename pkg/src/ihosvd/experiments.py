"""Desk-scale experiment runners behind the command-line interface.

Every trial draws its instance, mask, and starting point from seeds derived
from ``(base_seed, rank, sample_ratio, trial)``, so results do not depend on
worker count or scheduling order.
"""
from __future__ import annotations

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import plotting
from .config import ExperimentConfig
from .fileio import fmt_float
from .metrics import factor_recovery_error, relative_error
from .observation import ObservationMask, sample_uniform
from .solvers import alsas_solve, hooi_solve, ihooi_solve, random_factors
from .solvers.model import SolveResult
from .synthetic import add_noise, generate
from .tensor_core import fro_norm

SCHEMA_VERSION = 1


def trial_seeds(base: int, rank: int, sr: float, trial: int) -> tuple[int, int, int, int]:
    """Independent seeds for (instance, mask, start point, noise) of one trial."""
    ss = np.random.SeedSequence([base, rank, int(round(sr * 1_000_000)), trial])
    return tuple(int(s) for s in ss.generate_state(4, dtype=np.uint64))


def write_csv(path: Path, kind: str, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    def cell(v):
        if v is None:
            return ""
        if isinstance(v, (bool, np.bool_)):
            return str(int(v))
        if isinstance(v, (int, np.integer)):
            return str(int(v))
        if isinstance(v, (float, np.floating)):
            return fmt_float(v)
        return str(v)

    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# ihosvd {kind} schema v{SCHEMA_VERSION}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([cell(v) for v in row])


def read_csv(path) -> tuple[list[str], list[dict[str, str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        lines = [line for line in fh if not line.startswith("#")]
    reader = csv.DictReader(lines)
    return list(reader.fieldnames or []), list(reader)


def _pool_map(fn: Callable, tasks: list, threads: int) -> list:
    if threads <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def _solve(name: str, mask: ObservationMask, data: np.ndarray, scfg, init, callback=None) -> SolveResult:
    if name == "ihooi":
        return ihooi_solve(mask, data, scfg, init_factors=init, callback=callback)
    if name == "alsas":
        return alsas_solve(mask, data, scfg, init_factors=init, callback=callback)
    if name == "hooi":
        return hooi_solve(data, scfg.initial_ranks, scfg, callback=callback)
    raise ValueError(f"unknown solver {name!r}")


@dataclass
class Instance:
    truth: object
    clean: np.ndarray
    data: np.ndarray
    mask: ObservationMask
    init: list[np.ndarray]
    solver_seed: int


def make_instance(cfg: ExperimentConfig, rank_spec, sr: float, trial: int, complete: bool = False) -> Instance:
    ranks = cfg.expand(tuple(rank_spec))
    gseed, mseed, iseed, nseed = trial_seeds(cfg.seed, ranks[0], sr, trial)
    truth, clean = generate(cfg.generator(gseed, ranks))
    data = add_noise(clean, cfg.noise, nseed)
    mask = ObservationMask.full(clean.shape) if complete else sample_uniform(clean.shape, sr, mseed)
    scfg = cfg.solver_config(ranks, iseed)
    init = random_factors(clean.shape, scfg.initial_ranks, np.random.default_rng(iseed))
    return Instance(truth, clean, data, mask, init, iseed)


# -- convergence ---------------------------------------------------------------

def run_convergence(cfg: ExperimentConfig) -> dict:
    """Per-iteration traces of each solver from one shared starting point."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    ndim = len(cfg.shape)
    rows, timing = [], []
    traces: dict[str, list[tuple[int, float, float]]] = {}
    for name in cfg.solver_names:
        inst = make_instance(cfg, cfg.ranks, cfg.sr, 0, complete=(name == "hooi"))
        scfg = cfg.solver_config(inst.truth.ranks, inst.solver_seed)
        mnorm = fro_norm(inst.clean)
        series = traces.setdefault(name, [])

        def record(k, model, x, row, name=name, inst=inst, mnorm=mnorm, series=series):
            rec = model.reconstruct()
            rel_omega = fro_norm(inst.mask.project(rec - inst.clean)) / mnorm
            rel = fro_norm(rec - inst.clean) / mnorm
            gaps = list(row.gap_ratios) or [None] * ndim
            rows.append(
                [name, k, rel_omega, rel, row.obj, row.rel_change, row.step_norm, *gaps,
                 "x".join(map(str, row.ranks))]
            )
            timing.append([name, k, row.wall_time])
            series.append((k, row.wall_time, rel_omega))

        _solve(name, inst.mask, inst.data, scfg, inst.init, callback=record)
    header = ["solver", "iteration", "relerr_omega", "relerr", "objective", "rel_change",
              "step_norm", *[f"gap_ratio_{n + 1}" for n in range(ndim)], "ranks"]
    csv_path = out / "convergence.csv"
    write_csv(csv_path, "convergence", header, rows)
    write_csv(out / "convergence_timing.csv", "convergence-timing",
              ["solver", "iteration", "wall_time"], timing)
    fig_path = plotting.plot_convergence(traces, out / "convergence.svg")
    return {"csv": csv_path, "figure": fig_path, "rows": rows}


# -- phase transition and factor recovery --------------------------------------

@dataclass(frozen=True)
class TrialTask:
    cfg: ExperimentConfig
    solver: str
    rank: int
    sr: float
    trial: int
    measure: str  # "relerr" or "factor"


@dataclass
class TrialResult:
    error: float
    iterations: int
    success: bool


def run_trial(task: TrialTask) -> TrialResult:
    cfg = task.cfg
    inst = make_instance(cfg, (task.rank,), task.sr, task.trial)
    if task.measure == "factor" and cfg.inject_truth:
        return TrialResult(0.0, 0, True)
    scfg = cfg.solver_config(inst.truth.ranks, inst.solver_seed)
    res = _solve(task.solver, inst.mask, inst.data, scfg, inst.init)
    if task.measure == "factor":
        err = factor_recovery_error(inst.truth, res.model)
    else:
        err = relative_error(res.model.reconstruct(), inst.clean)
    return TrialResult(err, len(res.trace), bool(err <= cfg.threshold))


@dataclass
class Cell:
    solver: str
    rank: int
    sr: float
    successes: int
    trials: int
    mean_error: float | None
    mean_iters: float | None
    computed: bool

    @property
    def rate(self) -> float:
        return self.successes / self.trials


def _compute_cell(cfg, solver, r, sr, measure) -> Cell:
    tasks = [TrialTask(cfg, solver, r, sr, t, measure) for t in range(cfg.trials)]
    results = _pool_map(run_trial, tasks, cfg.threads)
    return _summarize(solver, r, sr, results)


def _summarize(solver, r, sr, results: list[TrialResult]) -> Cell:
    return Cell(
        solver, r, sr,
        successes=sum(res.success for res in results),
        trials=len(results),
        mean_error=float(np.mean([res.error for res in results])),
        mean_iters=float(np.mean([res.iterations for res in results])),
        computed=True,
    )


def grid_cells(cfg: ExperimentConfig, measure: str) -> list[Cell]:
    """Evaluate every (solver, rank, SR) cell of the grid.

    With ``early_exit`` a rank that succeeds on every trial is assumed to keep
    succeeding at larger sample ratios, and a sample ratio that fails every
    trial is assumed to keep failing at larger ranks; such cells are filled in
    without running and flagged as not computed.
    """
    ranks = sorted(cfg.rank_grid)
    srs = sorted(cfg.sr_grid)
    cells: list[Cell] = []
    for solver in cfg.solver_names:
        if not cfg.early_exit:
            tasks = [TrialTask(cfg, solver, r, sr, t, measure)
                     for r in ranks for sr in srs for t in range(cfg.trials)]
            results = _pool_map(run_trial, tasks, cfg.threads)
            for i, (r, sr) in enumerate((r, sr) for r in ranks for sr in srs):
                chunk = results[i * cfg.trials:(i + 1) * cfg.trials]
                cells.append(_summarize(solver, r, sr, chunk))
            continue
        all_pass: set[tuple[int, float]] = set()
        all_fail: set[tuple[int, float]] = set()
        for r in ranks:
            for sr in srs:
                if any(rr == r and s < sr for rr, s in all_pass):
                    cell = Cell(solver, r, sr, cfg.trials, cfg.trials, None, None, False)
                elif any(s == sr and rr < r for rr, s in all_fail):
                    cell = Cell(solver, r, sr, 0, cfg.trials, None, None, False)
                else:
                    cell = _compute_cell(cfg, solver, r, sr, measure)
                if cell.successes == cell.trials:
                    all_pass.add((r, sr))
                elif cell.successes == 0:
                    all_fail.add((r, sr))
                cells.append(cell)
    return cells


def _cell_rows(cells: list[Cell]):
    for c in cells:
        yield [c.solver, c.rank, c.sr, c.successes, c.trials, c.rate, c.mean_error,
               c.mean_iters, c.computed]


CELL_HEADER = ["solver", "r", "sr", "successes", "trials", "success_rate", "mean_error",
               "mean_iters", "computed"]


def run_phase_transition(cfg: ExperimentConfig) -> dict:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    cells = grid_cells(cfg, "relerr")
    csv_path = out / "phase.csv"
    write_csv(csv_path, "phase", CELL_HEADER, _cell_rows(cells))
    figs = [plotting.plot_phase(cells, solver, out / f"phase_{solver}.svg") for solver in cfg.solver_names]
    return {"csv": csv_path, "figures": figs, "cells": cells}


def run_recoverability(cfg: ExperimentConfig) -> dict:
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    cells = grid_cells(cfg, "factor")
    csv_path = out / "recover.csv"
    write_csv(csv_path, "recover", CELL_HEADER, _cell_rows(cells))
    fig = plotting.plot_recoverability(cells, out / "recover.svg")
    return {"csv": csv_path, "figure": fig, "cells": cells}


# -- completion ---------------------------------------------------------------

def run_completion(cfg: ExperimentConfig) -> dict:
    """Relative error and wall time of each solver on noisy synthetic data."""
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rows, timing = [], []
    summary: dict[str, dict[str, float]] = {}
    for name in cfg.solver_names:
        errs, secs = [], []
        for trial in range(cfg.trials):
            inst = make_instance(cfg, cfg.ranks, cfg.sr, trial, complete=(name == "hooi"))
            scfg = cfg.solver_config(inst.truth.ranks, inst.solver_seed)
            res = _solve(name, inst.mask, inst.data, scfg, inst.init)
            err = relative_error(res.model.reconstruct(), inst.clean)
            wall = res.trace.rows[-1].wall_time if len(res.trace) else 0.0
            rows.append([name, trial, err, len(res.trace), "x".join(map(str, res.model.ranks)),
                         res.trace.stop_reason])
            timing.append([name, trial, wall])
            errs.append(err)
            secs.append(wall)
        summary[name] = {"relerr": float(np.mean(errs)), "seconds": float(np.mean(secs))}
    csv_path = out / "complete.csv"
    write_csv(csv_path, "complete", ["solver", "trial", "relerr", "iterations", "ranks", "stop"], rows)
    write_csv(out / "complete_timing.csv", "complete-timing", ["solver", "trial", "seconds"], timing)
    fig = plotting.plot_completion(summary, out / "complete.svg")
    return {"csv": csv_path, "figure": fig, "summary": summary, "rows": rows}


def format_summary(summary: dict[str, dict[str, float]]) -> str:
    lines = [f"{'solver':<8} {'relerr':>12} {'time (s)':>10}"]
    for name, vals in summary.items():
        rel = vals["relerr"]
        lines.append(f"{name:<8} {rel:>12.3e} {vals['seconds']:>10.3f}" if math.isfinite(rel)
                     else f"{name:<8} {'nan':>12} {vals['seconds']:>10.3f}")
    return "\n".join(lines)


RUNNERS = {
    "convergence": run_convergence,
    "phase": run_phase_transition,
    "recover": run_recoverability,
    "complete": run_completion,
}
