import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ihosvd.tensor_core import (
    as_tensor, fold, fro_norm, inner, kron, kron_all, mode_product, multi_mode_product,
    product_all, unfold, vectorize,
)

shapes = st.lists(st.integers(1, 4), min_size=1, max_size=4).map(tuple)


def unfold_by_index(t, n):
    """Column index j = sum_{k != n} i_k J_k with J_k the product of earlier dims except n."""
    dims = t.shape
    cols = int(np.prod(dims)) // dims[n]
    out = np.zeros((dims[n], cols))
    for idx in itertools.product(*(range(d) for d in dims)):
        j, stride = 0, 1
        for k, d in enumerate(dims):
            if k == n:
                continue
            j += idx[k] * stride
            stride *= d
        out[idx[n], j] = t[idx]
    return out


@given(shapes, st.integers(0, 3))
@settings(max_examples=60, deadline=None)
def test_unfold_matches_index_formula(shape, n):
    n = n % len(shape)
    t = np.arange(np.prod(shape), dtype=float).reshape(shape)
    assert np.array_equal(unfold(t, n), unfold_by_index(t, n))
    assert np.array_equal(fold(unfold(t, n), n, shape), t)


def test_unfold_columns_are_fibers(rng):
    t = rng.standard_normal((3, 4, 2))
    u = unfold(t, 1)
    # first column is the mode-2 fiber with i1 = i3 = 0, the second has i1 = 1
    assert np.array_equal(u[:, 0], t[0, :, 0])
    assert np.array_equal(u[:, 1], t[1, :, 0])
    assert np.array_equal(u[:, 3], t[0, :, 1])


def test_vectorize_is_mode_one_fastest():
    t = np.arange(24.0).reshape((2, 3, 4))
    v = vectorize(t)
    assert v[1] == t[1, 0, 0] and v[2] == t[0, 1, 0] and v[6] == t[0, 0, 1]


def test_mode_product_shape_and_identity(rng):
    t = rng.standard_normal((3, 4, 5))
    assert mode_product(t, rng.standard_normal((7, 4)), 1).shape == (3, 7, 5)
    assert np.allclose(mode_product(t, np.eye(5), 2), t)
    with pytest.raises(ValueError):
        mode_product(t, np.eye(3), 1)
    with pytest.raises(IndexError):
        mode_product(t, np.eye(3), 3)


def test_product_all_matches_kronecker(rng):
    core = rng.standard_normal((2, 3, 2))
    mats = [rng.standard_normal((4, 2)), rng.standard_normal((3, 3)), rng.standard_normal((5, 2))]
    full = product_all(core, mats)
    assert np.allclose(vectorize(full), kron_all(mats[::-1]) @ vectorize(core))
    back = product_all(full, mats, transpose=True)
    assert np.allclose(back, product_all(core, [m.T @ m for m in mats]))


def test_multi_mode_product_rejects_repeated_mode(rng):
    t = rng.standard_normal((2, 2))
    with pytest.raises(ValueError):
        multi_mode_product(t, [(np.eye(2), 0), (np.eye(2), 0)])


def test_inner_and_norm(rng):
    a, b = rng.standard_normal((2, 3, 4)), rng.standard_normal((2, 3, 4))
    assert inner(a, b) == pytest.approx(float(np.sum(a * b)))
    assert fro_norm(a) == pytest.approx(np.sqrt(np.sum(a * a)))
    with pytest.raises(ValueError):
        inner(a, b[:1])


def test_as_tensor_reshapes_in_fortran_order():
    assert as_tensor(np.arange(6.0), (2, 3))[1, 0] == 1.0
    with pytest.raises(ValueError):
        as_tensor([1.0, 2.0], (0, 2))


def test_small_worked_values(rng):
    b = rng.standard_normal((3, 2))
    assert np.array_equal(kron(np.array([[2.0]]), b), 2 * b)
    t = rng.standard_normal((2, 3, 2))
    assert inner(t, np.zeros_like(t)) == 0.0
    assert fro_norm(np.ones((2, 2, 2))) == pytest.approx(np.sqrt(8.0), abs=0)
    assert inner(t, t) == float(np.dot(vectorize(t), vectorize(t)))


def test_order_one_and_two_tensors(rng):
    v = rng.standard_normal(4)
    m = rng.standard_normal((3, 4))
    assert np.allclose(mode_product(v, m, 0), m @ v)
    a = rng.standard_normal((3, 5))
    b = rng.standard_normal((4, 5))
    assert np.allclose(mode_product(mode_product(a, b, 1), m.T, 0), m.T @ a @ b.T)
    assert np.array_equal(unfold(a, 0), a) and np.array_equal(unfold(a, 1), a.T)
