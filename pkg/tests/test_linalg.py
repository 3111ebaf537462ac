import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings, strategies as st

from conftest import random_unitary
from weylsemigroup.linalg import expm, jacobi_eigvalsh


def test_expm_zero_and_diagonal():
    assert np.array_equal(expm(np.zeros((3, 3))), np.eye(3))
    d = np.array([0.5, -2.0, 3.0])
    assert np.allclose(expm(np.diag(d)), np.diag(np.exp(d)), rtol=1e-14)


def test_expm_nilpotent():
    a = np.array([[0.0, 2.0], [0.0, 0.0]])
    assert np.allclose(expm(a), [[1, 2], [0, 1]], atol=1e-15)


def test_expm_rotation():
    th = 2.7
    a = np.array([[0, -th], [th, 0]])
    r = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    assert np.abs(expm(a) - r).max() < 1e-14


@pytest.mark.parametrize("n", [2, 5, 9, 16])
def test_expm_matches_scipy(n, rng):
    for scale in (0.01, 1.0, 8.0):
        a = scale * (rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n)))
        ref = scipy.linalg.expm(a)
        assert np.abs(expm(a) - ref).max() <= 1e-10 * max(1.0, np.abs(ref).max())


def test_expm_rejects_non_square():
    with pytest.raises(ValueError):
        expm(np.zeros((2, 3)))


@pytest.mark.parametrize("n", [1, 2, 4, 9, 16])
def test_jacobi_matches_lapack(n, rng):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = a + a.conj().T
    assert np.abs(jacobi_eigvalsh(h) - np.linalg.eigvalsh(h)).max() < 1e-10


def test_jacobi_known_spectrum(rng):
    ev = np.array([-3.0, -1e-9, 0.0, 2.0, 2.0, 7.5])
    u = random_unitary(rng, 6)
    h = u @ np.diag(ev) @ u.conj().T
    assert np.abs(jacobi_eigvalsh(h) - ev).max() < 1e-10


def test_jacobi_rejects_non_square():
    with pytest.raises(ValueError):
        jacobi_eigvalsh(np.zeros((2, 3)))


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=2, max_value=8))
def test_jacobi_trace_and_order(seed, n):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = a + a.conj().T
    ev = jacobi_eigvalsh(h)
    assert np.all(np.diff(ev) >= 0)
    assert abs(ev.sum() - np.trace(h).real) < 1e-9
    assert abs((ev ** 2).sum() - np.linalg.norm(h) ** 2) < 1e-8 * max(1, np.linalg.norm(h) ** 2)
