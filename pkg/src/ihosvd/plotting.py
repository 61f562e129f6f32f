"""Static figures written next to the CSV outputs."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "svg.hashsalt": "ihosvd",
}
COLORS = {"ihooi": "tab:blue", "alsas": "tab:orange", "hooi": "tab:green"}


def _save(fig, path) -> Path:
    path = Path(path)
    fig.savefig(path, metadata={"Date": None})
    plt.close(fig)
    return path


def plot_convergence(traces: dict[str, list[tuple[int, float, float]]], path) -> Path:
    """Relative error on the observed entries against iteration and time."""
    with plt.rc_context(STYLE):
        fig, (ax_it, ax_t) = plt.subplots(1, 2, figsize=(7.0, 2.8), constrained_layout=True)
        for name, series in traces.items():
            if not series:
                continue
            k, t, err = (np.array(v) for v in zip(*series))
            err = np.maximum(err, 1e-17)
            ax_it.semilogy(k, err, label=name, color=COLORS.get(name))
            ax_t.semilogy(t, err, label=name, color=COLORS.get(name))
        ax_it.set_xlabel("iteration")
        ax_t.set_xlabel("time (s)")
        ax_it.set_ylabel("relative error on observed entries")
        if traces and any(traces.values()):
            ax_it.legend()
        return _save(fig, path)


def plot_phase(cells, solver: str, path) -> Path:
    """Greyscale success-rate grid; white is always recovered, black never."""
    cells = [c for c in cells if c.solver == solver]
    ranks = sorted({c.rank for c in cells})
    srs = sorted({c.sr for c in cells})
    grid = np.zeros((len(srs), len(ranks)))
    for c in cells:
        grid[srs.index(c.sr), ranks.index(c.rank)] = c.rate
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(3.2, 3.0), constrained_layout=True)
        ax.imshow(grid, cmap="gray", vmin=0.0, vmax=1.0, origin="lower", aspect="auto",
                  interpolation="nearest")
        ax.set_xticks(range(len(ranks)), [str(r) for r in ranks])
        ax.set_yticks(range(len(srs)), [f"{s:g}" for s in srs])
        ax.set_xlabel("rank r")
        ax.set_ylabel("sample ratio")
        ax.set_title(solver)
        return _save(fig, path)


def plot_recoverability(cells, path) -> Path:
    """Success rate of factor recovery against rank, one panel per sample ratio."""
    srs = sorted({c.sr for c in cells})
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(1, len(srs), figsize=(2.6 * len(srs), 2.6),
                                 constrained_layout=True, squeeze=False)
        for ax, sr in zip(axes[0], srs):
            for solver in dict.fromkeys(c.solver for c in cells):
                sel = sorted((c.rank, c.rate) for c in cells if c.solver == solver and c.sr == sr)
                r, rate = zip(*sel)
                ax.plot(r, rate, marker="o", ms=3, label=solver, color=COLORS.get(solver))
            ax.set_ylim(-0.05, 1.05)
            ax.set_title(f"SR = {sr:g}")
            ax.set_xlabel("rank r")
        axes[0][0].set_ylabel("success rate")
        axes[0][0].legend()
        return _save(fig, path)


def plot_completion(summary: dict[str, dict[str, float]], path) -> Path:
    names = list(summary)
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(3.0, 2.6), constrained_layout=True)
        vals = [max(summary[n]["relerr"], 1e-17) for n in names]
        ax.bar(names, vals, color=[COLORS.get(n, "grey") for n in names])
        ax.set_yscale("log")
        ax.set_ylabel("mean relative error")
        return _save(fig, path)
