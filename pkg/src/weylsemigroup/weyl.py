"""Weyl (clock-and-shift) matrices and mixed-unitary Weyl channels.

Index conventions used throughout the package:

* a Weyl matrix ``U_{kl} = X^k Z^l`` carries the single index ``mu = N*k + l``;
* ``|A>>`` is the row-major vectorisation ``A.reshape(-1)``, so that
  ``(A kron C.T) |B>> = |A B C>>``;
* superoperators act on ``|rho>>``, rows are output index pairs ``(m, mu)``
  and columns input pairs ``(n, nu)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULT_TOL, InvalidDensityMatrix, NonPhysicalSpectrum, ToleranceConfig, WeylError


def omega(n: int) -> complex:
    return np.exp(2j * np.pi / n)


def _check_dim(n: int) -> int:
    if int(n) != n or n < 2:
        raise WeylError(f"dimension must be an integer >= 2, got {n!r}")
    return int(n)


def split_index(n: int, mu: int) -> tuple[int, int]:
    """``mu -> (k, l)`` with ``mu = n*k + l``."""
    return divmod(mu, n)


def conjugate_index(n: int, mu: int) -> int:
    """Index of the Weyl matrix proportional to ``U_mu^dagger``."""
    k, l = divmod(mu, n)
    return ((-k) % n) * n + (-l) % n


@lru_cache(maxsize=None)
def _shift(n: int) -> np.ndarray:
    x = np.zeros((n, n), dtype=complex)
    x[(np.arange(n) + 1) % n, np.arange(n)] = 1.0
    x.setflags(write=False)
    return x


@lru_cache(maxsize=None)
def _clock(n: int) -> np.ndarray:
    z = np.diag(omega(n) ** np.arange(n))
    z.setflags(write=False)
    return z


def shift_matrix(n: int) -> np.ndarray:
    """Cyclic shift ``X|i> = |i+1 mod n>``."""
    return _shift(_check_dim(n)).copy()


def clock_matrix(n: int) -> np.ndarray:
    """``Z = diag(1, w, ..., w^(n-1))`` with ``w = exp(2 pi i / n)``."""
    return _clock(_check_dim(n)).copy()


def weyl_matrix(n: int, k: int, l: int) -> np.ndarray:
    """Return ``X^k Z^l`` of order ``n``."""
    n = _check_dim(n)
    if not (0 <= k < n and 0 <= l < n):
        raise WeylError(f"Weyl indices must lie in [0, {n}), got ({k}, {l})")
    # (X^k Z^l)[i, j] = delta(i, j+k) w^(l j)
    u = np.zeros((n, n), dtype=complex)
    j = np.arange(n)
    u[(j + k) % n, j] = omega(n) ** (l * j)
    return u


@lru_cache(maxsize=None)
def _weyl_stack(n: int) -> np.ndarray:
    stack = np.array([weyl_matrix(n, k, l) for k in range(n) for l in range(n)])
    stack.setflags(write=False)
    return stack


def weyl_basis(n: int) -> np.ndarray:
    """All ``n**2`` Weyl matrices stacked in single-index order."""
    return _weyl_stack(_check_dim(n)).copy()


@lru_cache(maxsize=None)
def _hadamard(n: int) -> np.ndarray:
    m, nn = np.divmod(np.arange(n * n), n)
    k, l = m, nn
    # H[(m n), (k l)] = w^(m l - k n)
    expo = (np.outer(m, l) - np.outer(nn, k)) % n
    h = omega(n) ** expo
    h.setflags(write=False)
    return h


def hadamard_H(n: int) -> np.ndarray:
    """Complex Hadamard matrix mapping Weyl probabilities to channel eigenvalues.

    ``H[(m,n), (k,l)] = w^(m*l - k*n)``; Hermitian with ``H @ H = n**2 I``.
    """
    return _hadamard(_check_dim(n)).copy()


@dataclass(frozen=True)
class WeylChannel:
    """Mixed-unitary channel ``rho -> sum_mu p_mu U_mu rho U_mu^dagger``."""

    n: int
    p: np.ndarray

    def __post_init__(self) -> None:
        n = _check_dim(self.n)
        p = np.array(self.p, dtype=float).reshape(-1)
        if p.shape != (n * n,):
            raise WeylError(f"need {n * n} probabilities for n={n}, got {p.size}")
        p.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "p", p)

    @classmethod
    def validated(cls, n: int, p, tol: ToleranceConfig = DEFAULT_TOL) -> "WeylChannel":
        ch = cls(n, p)
        check_probability_vector(ch.p, tol)
        return ch

    @classmethod
    def identity(cls, n: int) -> "WeylChannel":
        p = np.zeros(n * n)
        p[0] = 1.0
        return cls(n, p)

    @classmethod
    def depolarizing(cls, n: int) -> "WeylChannel":
        return cls(n, np.full(n * n, 1.0 / (n * n)))

    @property
    def p_matrix(self) -> np.ndarray:
        """Probabilities reshaped to ``p[k, l]``."""
        return self.p.reshape(self.n, self.n)

    def to_json(self) -> dict:
        return {"n": self.n, "p": [float(x) for x in self.p]}

    @classmethod
    def from_json(cls, obj: dict) -> "WeylChannel":
        return cls.validated(int(obj["n"]), obj["p"])


def check_probability_vector(p: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> None:
    p = np.asarray(p, dtype=float)
    if np.any(p < -tol.simplex):
        raise WeylError(f"negative probability {p.min():.3g}")
    if abs(p.sum() - 1.0) > tol.simplex:
        raise WeylError(f"probabilities sum to {p.sum():.12g}, not 1")


def spectrum_from_probabilities(ch: WeylChannel) -> np.ndarray:
    """Superoperator eigenvalues ``lambda = H p`` (index ``mu = N*m + n``)."""
    return _hadamard(ch.n) @ ch.p


def probabilities_from_spectrum(
    lam: np.ndarray, n: int, tol: ToleranceConfig = DEFAULT_TOL
) -> np.ndarray:
    """Invert :func:`spectrum_from_probabilities`, ``p = H lambda / N**2``.

    Raises:
        NonPhysicalSpectrum: the result has an imaginary part or a negative
            entry beyond tolerance.
    """
    n = _check_dim(n)
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    if lam.shape != (n * n,):
        raise WeylError(f"need {n * n} eigenvalues for n={n}, got {lam.size}")
    p = _hadamard(n) @ lam / (n * n)
    if np.max(np.abs(p.imag)) > tol.residual:
        raise NonPhysicalSpectrum(
            f"spectrum is not conjugation symmetric (imaginary residual {np.abs(p.imag).max():.2e})"
        )
    p = p.real
    if np.any(p < -tol.simplex):
        raise NonPhysicalSpectrum(f"spectrum maps to negative probabilities: p = {p.tolist()}")
    return p


def superoperator_of(ch: WeylChannel) -> np.ndarray:
    """``Phi = sum_mu p_mu U_mu kron conj(U_mu)`` acting on row-major ``|rho>>``."""
    us = _weyl_stack(ch.n)
    return np.einsum("m,mij,mkl->ikjl", ch.p, us, us.conj()).reshape(ch.n**2, ch.n**2)


def reshuffle(m: np.ndarray) -> np.ndarray:
    """Realignment ``X^R[(m mu), (n nu)] = X[(m n), (mu nu)]``; an involution."""
    m = np.asarray(m)
    d2 = m.shape[0]
    d = int(round(np.sqrt(d2)))
    if m.ndim != 2 or m.shape != (d2, d2) or d * d != d2:
        raise WeylError(f"reshuffle needs a square matrix of order N**2, got {m.shape}")
    return m.reshape(d, d, d, d).transpose(0, 2, 1, 3).reshape(d2, d2)


def choi_of(ch: WeylChannel) -> np.ndarray:
    """Dynamical (Choi) matrix ``D = Phi^R = sum_mu p_mu |U_mu>><<U_mu|``."""
    return reshuffle(superoperator_of(ch))


def vec(a: np.ndarray) -> np.ndarray:
    return np.asarray(a).reshape(-1)


def unvec(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v).reshape(-1)
    d = int(round(np.sqrt(v.size)))
    return v.reshape(d, d)


def check_density_matrix(rho: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDensityMatrix(f"density matrix must be square, got {rho.shape}")
    if np.abs(rho - rho.conj().T).max() > tol.residual:
        raise InvalidDensityMatrix("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol.residual:
        raise InvalidDensityMatrix(f"density matrix has trace {np.trace(rho).real:.12g}")
    if np.linalg.eigvalsh(rho).min() < -tol.simplex:
        raise InvalidDensityMatrix("density matrix is not positive semidefinite")
    return rho


def kraus_operators(ch: WeylChannel) -> np.ndarray:
    """Kraus operators ``sqrt(p_kl) X^k Z^l``, stacked in single-index order."""
    return np.sqrt(np.clip(ch.p, 0.0, None))[:, None, None] * _weyl_stack(ch.n)


def kraus_apply(ch: WeylChannel, rho: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Apply the channel to a density matrix in Kraus form."""
    rho = check_density_matrix(rho, tol)
    if rho.shape[0] != ch.n:
        raise InvalidDensityMatrix(f"state has dimension {rho.shape[0]}, channel {ch.n}")
    ks = kraus_operators(ch)
    return np.einsum("mij,jk,mlk->il", ks, rho, ks.conj())


def circulant(q: np.ndarray) -> np.ndarray:
    """``sum_k q_k X^k``; entry ``[i, j] = q[(i - j) mod N]``."""
    q = np.asarray(q)
    n = q.size
    i, j = np.indices((n, n))
    return q[(i - j) % n]


def block_weights(ch: WeylChannel) -> np.ndarray:
    """``q^{(k)}_m = sum_l w^(k l) p_{m l}``, one row per block ``k``."""
    n = ch.n
    phases = omega(n) ** (np.outer(np.arange(n), np.arange(n)) % n)  # [k, l]
    return phases @ ch.p_matrix.T  # [k, m]


def block_permutation(n: int) -> np.ndarray:
    """Row-major positions of the basis ``|j+k, j>`` ordered by ``(k, j)``."""
    k, j = np.divmod(np.arange(n * n), n)
    return ((j + k) % n) * n + j


def block_diagonalize(ch: WeylChannel) -> list[np.ndarray]:
    """Circulant blocks ``Phi^(k) = sum_m q^(k)_m X^m`` of the superoperator.

    In the permuted basis ``{|j+k, j>}`` the superoperator is the direct sum
    of these ``N`` blocks; block 0 is the hyper-decohered transition matrix.
    """
    return [circulant(row) for row in block_weights(ch)]


def polygon_contains(z: np.ndarray, n: int, tol: float = 1e-10) -> np.ndarray:
    """Whether points lie in the closed regular polygon with vertices ``w^j``."""
    z = np.asarray(z, dtype=complex)
    verts = omega(n) ** np.arange(n)
    inside = np.ones(z.shape, dtype=bool)
    for a, b in zip(verts, np.roll(verts, -1)):
        edge = b - a
        cross = edge.real * (z - a).imag - edge.imag * (z - a).real
        inside &= cross >= -tol
    return inside
