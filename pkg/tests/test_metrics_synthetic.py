import numpy as np
import pytest

from ihosvd.metrics import (
    SUCCESS_THRESHOLD, factor_recovery_error, recovery_report, relative_error, subspace_errors, success,
)
from ihosvd.solvers import FactorModel, random_factors
from ihosvd.synthetic import Family, GeneratorSpec, add_noise, generate
from ihosvd.tensor_core import mode_product, unfold


def test_relative_error(rng):
    t = rng.standard_normal((3, 4, 2))
    assert relative_error(t, t) == 0.0
    assert relative_error(2 * t, t) == pytest.approx(1.0)
    s = rng.standard_normal(t.shape)
    oracle = np.sqrt(sum((a - b) ** 2 for a, b in zip(s.flat, t.flat))) / np.sqrt(sum(b * b for b in t.flat))
    assert abs(relative_error(s, t) - oracle) <= 1e-13
    with pytest.raises(ValueError):
        relative_error(t, np.zeros_like(t))


def test_factor_error_rotation_invariance(rng):
    truth, _ = generate(GeneratorSpec("gaussian", (6, 5, 4), (2, 3, 2), 3))
    assert abs(factor_recovery_error(truth, truth)) <= 1e-12
    core, factors = truth.core, list(truth.factors)
    for n, a in enumerate(factors):
        q = np.linalg.qr(rng.standard_normal((a.shape[1],) * 2))[0]
        factors[n] = a @ q
        core = mode_product(core, q.T, n)
    rotated = FactorModel(core, factors)
    assert factor_recovery_error(truth, rotated) <= 1e-10


def test_orthogonal_complement_gives_unit_subspace_error(rng):
    a = [np.eye(4)[:, [0]] for _ in range(3)]
    truth = FactorModel(np.ones((1, 1, 1)), a)
    est_factors = list(a)
    est_factors[0] = np.eye(4)[:, [2]]
    est = FactorModel(np.ones((1, 1, 1)), est_factors)
    sub = subspace_errors(truth, est)
    assert sub[0] == 1.0 and sub[1] == 0.0 and sub[2] == 0.0


def test_subspace_bound_and_equality(rng):
    for _ in range(50):
        a = random_factors((7,), (3,), rng)[0]
        b = random_factors((7,), (3,), rng)[0]
        assert np.linalg.norm(a.T @ b) <= np.sqrt(3) + 1e-10
        q = np.linalg.qr(rng.standard_normal((3, 3)))[0]
        assert abs(np.linalg.norm(a.T @ (a @ q)) - np.sqrt(3)) <= 1e-10


def test_recovery_report_checks(rng):
    truth, _ = generate(GeneratorSpec("gaussian", (5, 5, 5), (2, 2, 2), 0))
    other, _ = generate(GeneratorSpec("gaussian", (5, 5, 5), (1, 2, 2), 0))
    with pytest.raises(ValueError):
        recovery_report(truth, other)
    report = recovery_report(truth, truth)
    assert report.success and report.relerr == 0.0


def test_success_threshold_inclusive():
    assert SUCCESS_THRESHOLD == 1e-2
    assert success(0.0) and success(1e-2) and not success(1.1e-2)


def test_generate_gaussian_ranks_and_determinism():
    spec = GeneratorSpec("gaussian", (20, 20, 20), (3, 3, 3), 5)
    truth, m = generate(spec)
    _, m2 = generate(spec)
    assert np.array_equal(m, m2)
    for n in range(3):
        s = np.linalg.svd(unfold(m, n), compute_uv=False)
        assert np.sum(s > 1e-8 * s[0]) == 3
        a = truth.factors[n]
        assert np.linalg.norm(a.T @ a - np.eye(3)) <= 1e-10
    assert np.allclose(truth.reconstruct(), m)


def test_generate_full_rank_and_powerlaw():
    _, m = generate(GeneratorSpec("gaussian", (3, 4, 2), (3, 4, 2), 1))
    for n in range(3):
        assert np.linalg.svd(unfold(m, n), compute_uv=False)[-1] > 0
    truth, m = generate(GeneratorSpec(Family.POWERLAW, (10, 10, 10), (3, 3, 3), 2))
    assert np.all(truth.core.shape == (3, 3, 3))
    assert np.allclose(truth.reconstruct(), m)
    with pytest.raises(ValueError):
        GeneratorSpec("gaussian", (3, 3), (4, 1))
    with pytest.raises(ValueError):
        GeneratorSpec("cauchy", (3, 3), (1, 1))


def test_add_noise(rng):
    t = rng.standard_normal((10, 10, 10))
    assert add_noise(t, 0.0, 1) is t
    noisy = add_noise(t, 0.5, 7)
    ratio = np.sum((noisy - t) ** 2) / (0.25 * t.size)
    assert 0.8 <= ratio <= 1.2
    assert np.array_equal(noisy, add_noise(t, 0.5, 7))
    with pytest.raises(ValueError):
        add_noise(t, -1.0, 0)
