import numpy as np
import pytest


def random_p(rng, n, size=None):
    """Flat-Dirichlet probability vector(s) of length n*n."""
    return rng.dirichlet(np.ones(n * n), size=size)


def random_times(rng, n, scale=0.5):
    t = rng.exponential(scale, n * n)
    t[0] = 0.0
    return t


def random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_state(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
