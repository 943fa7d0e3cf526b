import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gmfg.linalg import jacobi_eigh


def _sym(a):
    return 0.5 * (a + a.T)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 8).flatmap(
    lambda n: arrays(np.float64, (n, n), elements=st.floats(-1.0, 1.0))))
def test_matches_lapack(a):
    a = _sym(a)
    w, v = jacobi_eigh(a)
    ref = np.sort(np.linalg.eigvalsh(a))[::-1]
    assert np.allclose(w, ref, atol=1e-12)
    assert np.allclose(a @ v, v * w, atol=1e-12)
    assert np.allclose(v.T @ v, np.eye(a.shape[0]), atol=1e-12)
    assert np.all(np.diff(w) <= 1e-15)


def test_sign_convention():
    a = np.array([[0.8, 0.2], [0.2, 0.6]])
    w, v = jacobi_eigh(a)
    for col in v.T:
        first = col[np.abs(col) > 1e-12][0]
        assert first > 0
    # eigenvalues 0.7 +- sqrt(0.05)
    assert w == pytest.approx([0.7 + np.sqrt(0.05), 0.7 - np.sqrt(0.05)], abs=1e-15)


def test_deterministic():
    rng = np.random.default_rng(3)
    a = _sym(rng.random((6, 6)))
    w1, v1 = jacobi_eigh(a)
    w2, v2 = jacobi_eigh(a.copy())
    assert np.array_equal(w1, w2) and np.array_equal(v1, v2)


def test_zero_and_diagonal():
    w, v = jacobi_eigh(np.zeros((3, 3)))
    assert np.array_equal(w, np.zeros(3))
    w, v = jacobi_eigh(np.diag([1.0, 3.0, 2.0]))
    assert w.tolist() == [3.0, 2.0, 1.0]


def test_rejects_non_square():
    with pytest.raises(ValueError):
        jacobi_eigh(np.zeros((2, 3)))
