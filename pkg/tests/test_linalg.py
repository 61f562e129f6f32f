import numpy as np
import pytest

from ihosvd.linalg import (
    NumericalError, economy_qr, gap_ratio, leading_left_singular_vectors, lsq_via_pinv, pinv, svd,
)
from ihosvd.selfcheck import check_alignment, check_von_neumann, lemma_alignment_slack


def test_svd_small_cases():
    assert np.allclose(svd(np.eye(3)).s, 1.0)
    assert np.allclose(svd(np.diag([3.0, 2.0, 1.0])).s, [3, 2, 1])


def test_svd_against_gram_eigenvalues(rng):
    m = rng.standard_normal((6, 4))
    res = svd(m)
    oracle = np.sqrt(np.sort(np.linalg.eigvalsh(m.T @ m))[::-1])
    assert np.max(np.abs(res.s - oracle)) <= 1e-9
    assert np.linalg.norm(res.u.T @ res.u - np.eye(4)) <= 1e-10
    assert np.linalg.norm(res.v.T @ res.v - np.eye(4)) <= 1e-10
    assert np.linalg.norm((res.u * res.s) @ res.v.T - m) <= 1e-10 * np.linalg.norm(m)
    assert np.all(np.diff(res.s) <= 0) and np.all(res.s >= 0)


def test_svd_sign_convention_and_determinism(rng):
    m = rng.standard_normal((5, 3))
    a, b = svd(m), svd(m.copy())
    assert np.array_equal(a.u, b.u) and np.array_equal(a.s, b.s)
    cols = np.arange(a.u.shape[1])
    assert np.all(a.u[np.argmax(np.abs(a.u), axis=0), cols] >= 0)
    # flipping the input's sign flips v, never u
    c = svd(-m)
    assert np.allclose(c.u, a.u) and np.allclose(c.v, -a.v)


def test_svd_rejects_nonfinite():
    with pytest.raises(NumericalError):
        svd(np.array([[1.0, np.inf]]))


def test_gap_ratio_conventions():
    assert gap_ratio(np.array([3.0, 2.0, 1.0]), 2) == 0.5
    assert gap_ratio(np.array([1.0, 0.0]), 2) == 0.0
    assert gap_ratio(np.array([0.0, 0.0]), 1) == 0.0


def test_leading_vectors_diagonal_and_rank_one(rng):
    u, gap = leading_left_singular_vectors(np.diag([3.0, 2.0, 1.0]), 2)
    assert np.allclose(np.abs(u), np.eye(3)[:, :2]) and gap == pytest.approx(0.5)
    a, b = rng.standard_normal(4), rng.standard_normal(6)
    u, gap = leading_left_singular_vectors(np.outer(a, b), 1)
    assert np.allclose(np.abs(u[:, 0]), np.abs(a) / np.linalg.norm(a))
    assert gap == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("shape", [(8, 5), (3, 40)])
def test_leading_vectors_capture_top_energy(rng, shape):
    m = rng.standard_normal(shape)
    u, _ = leading_left_singular_vectors(m, 3)
    s = np.linalg.svd(m, compute_uv=False)
    assert np.linalg.norm(u.T @ u - np.eye(3)) <= 1e-10
    assert abs(np.linalg.norm(u.T @ m) ** 2 - np.sum(s[:3] ** 2)) <= 1e-9


def test_gram_route_matches_svd_route(rng):
    m = rng.standard_normal((4, 50))
    u_gram, g1 = leading_left_singular_vectors(m, 2)
    u_svd, g2 = leading_left_singular_vectors(m, 2, gram_factor=np.inf)
    assert np.allclose(u_gram @ u_gram.T, u_svd @ u_svd.T, atol=1e-10)
    assert g1 == pytest.approx(g2, rel=1e-8)


def test_leading_vectors_rank_out_of_range(rng):
    with pytest.raises(ValueError):
        leading_left_singular_vectors(rng.standard_normal((3, 2)), 3)


def test_economy_qr(rng):
    q = np.linalg.qr(rng.standard_normal((6, 3)))[0]
    res = economy_qr(q)
    assert np.allclose(np.abs(res.q), np.abs(q)) and np.allclose(res.r, np.eye(3))
    res = economy_qr(np.array([[2.0], [0.0]]))
    assert np.array_equal(res.q, [[1.0], [0.0]]) and np.array_equal(res.r, [[2.0]])
    m = rng.standard_normal((7, 3))
    res = economy_qr(m)
    assert np.linalg.norm(res.q @ res.r - m) <= 1e-12 * np.linalg.norm(m)
    assert np.all(np.diag(res.r) >= 0) and np.allclose(np.tril(res.r, -1), 0)
    with pytest.raises(ValueError):
        economy_qr(rng.standard_normal((2, 3)))


def test_pinv_penrose_conditions(rng):
    m = rng.standard_normal((5, 2)) @ rng.standard_normal((2, 4))
    p = pinv(m)
    assert np.allclose(m @ p @ m, m) and np.allclose(p @ m @ p, p)
    assert np.allclose((m @ p).T, m @ p) and np.allclose((p @ m).T, p @ m)


def test_lsq_cases(rng):
    x = rng.standard_normal((5, 6))
    assert np.allclose(lsq_via_pinv(x, np.eye(6)), x)
    assert np.array_equal(lsq_via_pinv(x, np.zeros((4, 6))), np.zeros((5, 4)))
    b = rng.standard_normal((4, 6))
    oracle = np.linalg.solve(b @ b.T, b @ x.T).T
    assert np.max(np.abs(lsq_via_pinv(x, b) - oracle)) <= 1e-9
    with pytest.raises(ValueError):
        lsq_via_pinv(x, np.eye(5))


def test_inequality_suites_small():
    assert all(c.passed for c in check_von_neumann(200))
    assert check_alignment(200).passed


def test_alignment_is_tight_at_the_optimum(rng):
    y = rng.standard_normal((6, 5))
    u = np.linalg.svd(y)[0][:, :2]
    assert abs(lemma_alignment_slack(u, y, 2)) <= 1e-10
