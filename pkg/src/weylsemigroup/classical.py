"""Classical shadows of Weyl channels: circulant bistochastic matrices.

Hyper-decoherence keeps only the populations, ``T_ij = Phi[(ii), (jj)]``,
which for a Weyl channel is the circulant ``T = sum_k q_k X^k`` with
``q_k = sum_l p_kl``.  Embeddability into a Kolmogorov semigroup with the
generators ``X^k - I`` mirrors the quantum test with the Fourier matrix in
place of ``H``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from .accessibility import Verdict, _decide, _pairs, _check_times, principal_logs
from .config import (
    DEFAULT_SEARCH,
    DEFAULT_TOL,
    NonPhysicalSpectrum,
    NonRealTimes,
    SearchConfig,
    ToleranceConfig,
    UnsupportedShape,
    WeylError,
)
from .weyl import WeylChannel, _check_dim, _shift, circulant, omega


@dataclass(frozen=True)
class Circulant:
    """Circulant bistochastic matrix ``sum_k q_k X^k``."""

    q: np.ndarray

    def __post_init__(self) -> None:
        q = np.array(self.q, dtype=float).reshape(-1)
        _check_dim(q.size)
        q.setflags(write=False)
        object.__setattr__(self, "q", q)

    @property
    def n(self) -> int:
        return self.q.size

    @property
    def matrix(self) -> np.ndarray:
        return circulant(self.q)

    def to_json(self) -> dict:
        return {"n": self.n, "q": [float(x) for x in self.q]}

    @classmethod
    def from_json(cls, obj: dict) -> "Circulant":
        c = cls(obj["q"])
        if "n" in obj and int(obj["n"]) != c.n:
            raise WeylError(f"n={obj['n']} does not match {c.n} weights")
        check_weights(c.q)
        return c


def check_weights(q: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> None:
    if np.any(q < -tol.simplex) or abs(q.sum() - 1.0) > tol.simplex:
        raise WeylError(f"circulant weights must be a probability vector, got {list(q)}")


def as_circulant(t, tol: ToleranceConfig = DEFAULT_TOL) -> Circulant:
    """Accept a :class:`Circulant` or a full stochastic matrix."""
    if isinstance(t, Circulant):
        check_weights(t.q, tol)
        return t
    m = np.asarray(t, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise UnsupportedShape(f"need a square matrix, got shape {m.shape}")
    q = m[:, 0]
    if np.abs(circulant(q) - m).max() > tol.residual:
        raise UnsupportedShape("matrix is not circulant; only circulant matrices are supported")
    check_weights(q, tol)
    return Circulant(q)


def hyperdecohere_channel(ch: WeylChannel) -> Circulant:
    """Marginal ``q_k = sum_l p_kl``; the circulant shadow of ``ch``."""
    return Circulant(ch.p_matrix.sum(axis=1))


def hyperdecohere_generator(sup: np.ndarray) -> np.ndarray:
    """``K_ij = L[(ii), (jj)]``, the classical block of a generator."""
    sup = np.asarray(sup)
    n = int(round(np.sqrt(sup.shape[0])))
    diag = np.arange(n) * (n + 1)
    return sup[np.ix_(diag, diag)].real.copy()


@lru_cache(maxsize=None)
def _fourier(n: int) -> np.ndarray:
    """``F[n, k] = w^(-n k)`` so that ``xi = F q``."""
    f = omega(n) ** (-(np.outer(np.arange(n), np.arange(n)) % n))
    f.setflags(write=False)
    return f


def circulant_spectrum(t: Circulant) -> np.ndarray:
    """Eigenvalues ``xi_n = sum_k w^(-n k) q_k`` of ``T``."""
    return _fourier(t.n) @ t.q


def circulant_from_spectrum(xi: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> Circulant:
    """Inverse transform ``q = F^dagger xi / N``."""
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    n = _check_dim(xi.size)
    q = _fourier(n).conj().T @ xi / n
    if np.abs(q.imag).max() > tol.residual:
        raise NonPhysicalSpectrum("spectrum is not conjugation symmetric")
    q = q.real
    if np.any(q < -tol.simplex):
        raise NonPhysicalSpectrum(f"spectrum maps to negative weights q = {q.tolist()}")
    return Circulant(q)


@lru_cache(maxsize=None)
def classical_pairs(n: int):
    return _pairs(n, lambda k: (-k) % n)


def classical_accessibility_times(
    xi: np.ndarray, branch: np.ndarray | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> np.ndarray:
    """Times ``t_m = (1/N) sum_n w^(m n) (log xi_n + 2 pi i M_n)``, ``t_0 = 0``.

    Raises:
        SingularSpectrum: some ``xi`` vanishes.
        NonRealTimes: the branch gives complex times.
    """
    xi = np.asarray(xi, dtype=complex).reshape(-1)
    n = _check_dim(xi.size)
    logs = principal_logs(xi, classical_pairs(n), tol)
    m = np.zeros(n) if branch is None else np.asarray(branch, dtype=float).reshape(-1)
    if m.shape != (n,):
        raise WeylError(f"branch needs {n} integers, got {m.size}")
    t = _fourier(n).conj() @ (logs + 2j * np.pi * m) / n
    if np.abs(t.imag).max() > tol.imag:
        raise NonRealTimes(f"times have imaginary part {np.abs(t.imag).max():.3g}; invalid branch")
    t = t.real
    t[0] = 0.0
    return t


def kolmogorov_generator(t: np.ndarray, n: int) -> np.ndarray:
    """``K = sum_k t_k (X^k - I)``."""
    n = _check_dim(n)
    t = np.asarray(t, dtype=float).reshape(-1)
    x = _shift(n).real
    k = np.zeros((n, n))
    xk = np.eye(n)
    for tk in t[1:]:
        xk = x @ xk
        k += tk * (xk - np.eye(n))
    return k


def classical_semigroup_matrix(t: np.ndarray, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> Circulant:
    """Circulant reached after classical times ``t`` (``t[0]`` ignored)."""
    n = _check_dim(n)
    t = _check_times(t, n, tol)
    f = _fourier(n)
    # xi_j = exp(sum_m (w^(-j m) - 1) t_m)
    xi = np.exp((f - 1.0) @ t)
    q = (f.conj().T @ xi / n).real
    return Circulant(np.clip(q, 0.0, None))


def classical_semigroup_expm(t: np.ndarray, n: int) -> np.ndarray:
    """Brute-force ``expm(K)`` for the generator with times ``t``."""
    return linalg.expm(kolmogorov_generator(t, n))


def decide_embeddability(t, cfg: SearchConfig = DEFAULT_SEARCH) -> Verdict:
    """Decide whether a circulant bistochastic matrix lies on a Kolmogorov semigroup.

    Accepts a :class:`Circulant` or a full matrix (rejected with
    :class:`UnsupportedShape` unless circulant).
    """
    c = as_circulant(t, cfg.tol)
    n = c.n
    xi = circulant_spectrum(c)

    def reconstruct(times):
        return float(np.abs(classical_semigroup_matrix(times, n, cfg.tol).q - c.q).max())

    return _decide(xi, _fourier(n).conj(), n, classical_pairs(n), cfg, reconstruct)


def classical_log_generator(c: Circulant, branch: np.ndarray | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``log T`` on the given branch; the Kolmogorov generator when embeddable."""
    times = classical_accessibility_times(circulant_spectrum(c), branch, tol)
    return kolmogorov_generator(times, c.n)


def validate_kolmogorov(k: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Non-negative off-diagonal entries and zero column sums."""
    k = np.asarray(k)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise WeylError(f"need a square matrix, got shape {k.shape}")
    if np.iscomplexobj(k):
        if np.abs(k.imag).max() > tol.residual:
            return False
        k = k.real
    off = k[~np.eye(k.shape[0], dtype=bool)]
    return bool(np.all(off >= -tol.time) and np.abs(k.sum(axis=0)).max() <= tol.time)


__all__ = [
    "Circulant",
    "as_circulant",
    "hyperdecohere_channel",
    "hyperdecohere_generator",
    "circulant_spectrum",
    "circulant_from_spectrum",
    "classical_accessibility_times",
    "kolmogorov_generator",
    "classical_semigroup_matrix",
    "classical_semigroup_expm",
    "decide_embeddability",
    "classical_log_generator",
    "validate_kolmogorov",
]
