import numpy as np
import pytest

from ihosvd.cli import main
from ihosvd.config import ExperimentConfig, replace
from ihosvd.experiments import (
    CELL_HEADER, grid_cells, read_csv, run_completion, run_convergence, run_phase_transition,
    run_recoverability, trial_seeds,
)


def small(tmp_path, **kw):
    base = dict(shape=(8, 8, 8), ranks=(2,), sr=0.5, max_iters=60, out=str(tmp_path), trials=3)
    base.update(kw)
    return ExperimentConfig(**base)


def test_trial_seeds_are_distinct_and_stable():
    a = trial_seeds(0, 2, 0.5, 0)
    assert a == trial_seeds(0, 2, 0.5, 0) and len(set(a)) == 4
    assert a != trial_seeds(0, 2, 0.5, 1) and a != trial_seeds(0, 3, 0.5, 0)
    assert a != trial_seeds(1, 2, 0.5, 0)


def test_convergence_csv(tmp_path):
    res = run_convergence(small(tmp_path, shape=(10, 10, 10), max_iters=100, tol=1e-12))
    header, rows = read_csv(res["csv"])
    assert header[:3] == ["solver", "iteration", "relerr_omega"] and header[-1] == "ranks"
    assert {r["solver"] for r in rows} == {"ihooi", "alsas"}
    for name in ("ihooi", "alsas"):
        obj = [float(r["objective"]) for r in rows if r["solver"] == name]
        assert all(b <= a + 1e-12 * (1 + a) for a, b in zip(obj, obj[1:]))
    assert (tmp_path / "convergence.svg").stat().st_size > 0
    assert (tmp_path / "convergence_timing.csv").exists()
    assert res["csv"].read_text().startswith("# ihosvd convergence schema v1\n")


def test_convergence_zero_iterations_is_header_only(tmp_path):
    res = run_convergence(small(tmp_path, max_iters=0))
    lines = res["csv"].read_text().splitlines()
    assert len(lines) == 2 and lines[1].startswith("solver,iteration")


def test_convergence_hooi(tmp_path):
    res = run_convergence(small(tmp_path, solver="hooi", noise=0.01))
    _, rows = read_csv(res["csv"])
    assert rows and all(r["solver"] == "hooi" for r in rows)


def test_phase_easy_cell_and_schema(tmp_path):
    res = run_phase_transition(small(tmp_path, kind="phase", rank_grid=(1,), sr_grid=(0.9,), solver="ihooi"))
    header, rows = read_csv(res["csv"])
    assert header == CELL_HEADER
    assert float(rows[0]["success_rate"]) == 1.0 and rows[0]["computed"] == "1"


def test_phase_rate_nondecreasing_in_sr(tmp_path):
    cfg = small(tmp_path, kind="phase", solver="ihooi", shape=(10, 10, 10), rank_grid=(2, 3, 4),
                sr_grid=(0.1, 0.3, 0.6), trials=4, max_iters=300, tol=1e-6)
    cells = grid_cells(cfg, "relerr")
    for r in cfg.rank_grid:
        got = [c.successes for c in sorted((c for c in cells if c.rank == r), key=lambda c: c.sr)]
        assert all(b >= a - 1 for a, b in zip(got, got[1:])), (r, got)


def test_early_exit_agrees_on_computed_cells(tmp_path):
    cfg = small(tmp_path, kind="phase", solver="ihooi", rank_grid=(1, 2, 5), sr_grid=(0.05, 0.4, 0.8),
                trials=2, max_iters=150)
    plain = {(c.rank, c.sr): c for c in grid_cells(cfg, "relerr")}
    fast = grid_cells(replace(cfg, early_exit=True), "relerr")
    skipped = [c for c in fast if not c.computed]
    assert skipped
    for c in fast:
        if c.computed:
            assert (c.successes, c.mean_error) == (plain[(c.rank, c.sr)].successes, plain[(c.rank, c.sr)].mean_error)


def test_parallel_matches_serial(tmp_path):
    cfg = small(tmp_path, kind="phase", solver="alsas", rank_grid=(1, 2), sr_grid=(0.5,), trials=2)
    serial = grid_cells(cfg, "relerr")
    pooled = grid_cells(replace(cfg, threads=2), "relerr")
    assert [(c.successes, c.mean_error) for c in serial] == [(c.successes, c.mean_error) for c in pooled]


def test_recover_inject_truth(tmp_path):
    cfg = small(tmp_path, kind="recover", rank_grid=(2,), sr_grid=(0.5,), inject_truth=True)
    res = run_recoverability(cfg)
    assert all(c.rate == 1.0 for c in res["cells"])
    header, _ = read_csv(res["csv"])
    assert header == CELL_HEADER


def test_completion_summary(tmp_path):
    res = run_completion(small(tmp_path, kind="complete", trials=2, max_iters=500, tol=1e-8))
    assert set(res["summary"]) == {"ihooi", "alsas"}
    assert all(v["relerr"] <= 1e-4 for v in res["summary"].values())
    noisy = run_completion(small(tmp_path / "n", kind="complete", trials=1, noise=1.0, max_iters=50))
    assert all(np.isfinite(v["relerr"]) for v in noisy["summary"].values())


def test_cli_runs_and_is_deterministic(tmp_path, capsys):
    cfg = tmp_path / "phase.cfg"
    cfg.write_text("kind = phase\nshape = 8, 8, 8\nrank_grid = 1, 2\nsr_grid = 0.4\ntrials = 2\nmax_iters = 80\n")
    for out in ("a", "b"):
        assert main(["phase", "--config", str(cfg), "--seed", "5", "--out", str(tmp_path / out)]) == 0
    assert (tmp_path / "a/phase.csv").read_bytes() == (tmp_path / "b/phase.csv").read_bytes()
    assert "wrote" in capsys.readouterr().out


def test_cli_exit_codes(tmp_path, capsys):
    assert main(["phase", "--out", str(tmp_path)]) == 1
    assert main(["convergence", "--set", "bogus=1", "--out", str(tmp_path)]) == 1
    assert main(["convergence", "--seed", str(2**64), "--out", str(tmp_path)]) == 1
    with pytest.raises(SystemExit):
        main(["convergence", "--solver", "nope"])
    assert main(["complete", "--set", "trials=1", "--set", "max_iters=20", "--out", str(tmp_path)]) == 0
    assert "relerr" in capsys.readouterr().out


def test_cli_numerical_failure_exit_code(tmp_path, monkeypatch):
    from ihosvd import experiments
    from ihosvd.linalg import NumericalError

    def boom(cfg):
        raise NumericalError("synthetic failure")

    monkeypatch.setitem(experiments.RUNNERS, "convergence", boom)
    assert main(["convergence", "--out", str(tmp_path)]) == 2


def test_cli_selftest(capsys):
    assert main(["selftest"]) == 0
    assert "checks passed" in capsys.readouterr().out
