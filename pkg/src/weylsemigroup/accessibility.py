"""Accessibility of Weyl channels by Lindblad semigroups.

A Weyl channel is reached by ``exp(sum_mu t_mu L_mu)`` with the single-jump
generators ``L_mu = U_mu (x) conj(U_mu) - I`` iff its spectrum admits a
logarithm whose Hadamard transform is a non-negative time vector.  The
logarithm is fixed up to one integer branch per conjugate pair of
eigenvalues, searched in :mod:`weylsemigroup._branches`.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import linalg
from ._branches import search_branches
from .config import (
    DEFAULT_SEARCH,
    DEFAULT_TOL,
    NonRealTimes,
    SearchConfig,
    SingularSpectrum,
    ToleranceConfig,
    WeylError,
)
from .weyl import (
    WeylChannel,
    _check_dim,
    _hadamard,
    _weyl_stack,
    conjugate_index,
    reshuffle,
    spectrum_from_probabilities,
)

# verdict reasons
OK = "OK"
NEGATIVE_TIME = "NegativeTime"
SINGULAR = "SingularSpectrum"
NON_REAL = "NonReal"
BUDGET = "BudgetExhausted"


@dataclass(frozen=True)
class Verdict:
    """Outcome of an accessibility or embeddability decision."""

    accessible: bool
    reason: str
    times: np.ndarray | None = None
    branch: np.ndarray | None = None
    residual: float | None = None

    def to_json(self) -> dict:
        return {
            "accessible": bool(self.accessible),
            "reason": self.reason,
            "t": None if self.times is None else [float(x) for x in self.times],
            "M": None if self.branch is None else [int(x) for x in self.branch],
            "residual": None if self.residual is None else float(self.residual),
        }


@dataclass(frozen=True)
class PairLayout:
    """Conjugate-pair bookkeeping for a length ``size`` spectrum."""

    size: int
    reps: np.ndarray  # smaller index of each pair
    partners: np.ndarray
    selfconj: np.ndarray  # nonzero self-conjugate indices


def _pairs(size: int, conj) -> PairLayout:
    reps, partners, selfc = [], [], []
    for mu in range(1, size):
        nu = conj(mu)
        if nu == mu:
            selfc.append(mu)
        elif mu < nu:
            reps.append(mu)
            partners.append(nu)
    return PairLayout(size, np.array(reps, dtype=int), np.array(partners, dtype=int), np.array(selfc, dtype=int))


@lru_cache(maxsize=None)
def weyl_pairs(n: int) -> PairLayout:
    return _pairs(n * n, lambda mu: conjugate_index(n, mu))


def principal_logs(
    lam: np.ndarray, layout: PairLayout, tol: ToleranceConfig = DEFAULT_TOL
) -> np.ndarray:
    """Principal logarithms with conjugate-symmetric phases.

    The phase at each pair representative is taken in ``(-pi, pi]`` and its
    partner gets the opposite phase, so a pair of negative reals receives
    ``+pi`` at the smaller index and ``-pi`` at the larger one.  Entry 0 is
    set to 0.

    Raises:
        SingularSpectrum: some ``|lambda| <= tol.zero``.
    """
    lam = np.asarray(lam, dtype=complex)
    r = np.abs(lam)
    if np.any(r <= tol.zero):
        bad = [int(i) for i in np.flatnonzero(r <= tol.zero)]
        raise SingularSpectrum(f"zero eigenvalue at indices {bad}; no finite logarithm")
    theta = np.angle(lam)
    theta[theta <= -np.pi] = np.pi
    theta[layout.partners] = -theta[layout.reps]
    logs = np.log(r) + 1j * theta
    logs[0] = 0.0
    return logs


def lindblad_generator(n: int, mu: int) -> np.ndarray:
    """``L_mu = U_mu (x) conj(U_mu) - I``; the zero matrix for ``mu = 0``."""
    n = _check_dim(n)
    if not 0 <= mu < n * n:
        raise WeylError(f"generator index must lie in [0, {n * n}), got {mu}")
    u = _weyl_stack(n)[mu]
    return np.kron(u, u.conj()) - np.eye(n * n)


def generator_from_times(t: np.ndarray, n: int) -> np.ndarray:
    """``sum_mu t_mu L_mu``."""
    n = _check_dim(n)
    t = np.asarray(t, dtype=float)
    us = _weyl_stack(n)
    sup = np.einsum("m,mij,mkl->ikjl", t, us, us.conj()).reshape(n * n, n * n)
    return sup - t[1:].sum() * np.eye(n * n) - t[0] * np.eye(n * n)


def _check_times(t: np.ndarray, size: int, tol: ToleranceConfig) -> np.ndarray:
    t = np.asarray(t, dtype=float).reshape(-1)
    if t.shape != (size,):
        raise WeylError(f"need {size} interaction times, got {t.size}")
    if np.any(t[1:] < -tol.time):
        raise WeylError(f"negative interaction time {t[1:].min():.3g}")
    t = t.copy()
    t[0] = 0.0
    return np.clip(t, 0.0, None)


def spectrum_from_times(t: np.ndarray, n: int) -> np.ndarray:
    """``lambda = exp(H' t)`` with ``H' = H - 1``."""
    h = _hadamard(n)
    return np.exp((h - 1.0) @ np.asarray(t, dtype=float))


def channel_from_times(t: np.ndarray, n: int, tol: ToleranceConfig = DEFAULT_TOL) -> WeylChannel:
    """Weyl channel reached after interaction times ``t`` (``t[0]`` ignored)."""
    n = _check_dim(n)
    t = _check_times(t, n * n, tol)
    p = _hadamard(n) @ spectrum_from_times(t, n) / (n * n)
    return WeylChannel(n, np.clip(p.real, 0.0, None))


def _raw_times(logs: np.ndarray, m: np.ndarray, layout: PairLayout, h: np.ndarray, scale: float) -> np.ndarray:
    full = np.zeros(layout.size, dtype=float)
    full[layout.reps] = m
    full[layout.partners] = -m
    return h @ (logs + 2j * np.pi * full) / scale


def accessibility_times(
    lam: np.ndarray, branch: np.ndarray | None = None, tol: ToleranceConfig = DEFAULT_TOL
) -> np.ndarray:
    """Interaction times generating a channel with spectrum ``lam``.

    ``branch`` holds ``M`` over all ``N**2`` indices (antisymmetric under
    conjugation, zero on self-conjugate ones); ``None`` means the principal
    branch.  The result may be negative; it is a witness only when it is not.

    Raises:
        SingularSpectrum: an eigenvalue is zero.
        NonRealTimes: the branch (or a lone negative eigenvalue) makes the
            times complex.
    """
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    n = int(round(np.sqrt(lam.size)))
    if n * n != lam.size:
        raise WeylError(f"spectrum length {lam.size} is not a square")
    n = _check_dim(n)
    layout = weyl_pairs(n)
    logs = principal_logs(lam, layout, tol)
    if branch is None:
        m = np.zeros(lam.size, dtype=float)
    else:
        m = np.asarray(branch, dtype=float).reshape(-1)
        if m.shape != lam.shape:
            raise WeylError(f"branch needs {lam.size} integers, got {m.size}")
    t = _hadamard(n) @ (logs + 2j * np.pi * m) / (n * n)
    if np.abs(t.imag).max() > tol.imag:
        raise NonRealTimes(f"times have imaginary part {np.abs(t.imag).max():.3g}; invalid branch")
    t = t.real
    t[0] = 0.0
    return t


def expand_branch(m_pairs: np.ndarray, layout: PairLayout) -> np.ndarray:
    full = np.zeros(layout.size, dtype=int)
    full[layout.reps] = m_pairs
    full[layout.partners] = -np.asarray(m_pairs)
    return full


def _nonreal_selfconj(lam: np.ndarray, layout: PairLayout, tol: ToleranceConfig) -> bool:
    # a self-conjugate eigenvalue is real; a negative one has no real logarithm
    if layout.selfconj.size == 0:
        return False
    return bool(np.any(lam[layout.selfconj].real < 0))


def _decide(
    lam: np.ndarray,
    h: np.ndarray,
    scale: float,
    layout: PairLayout,
    cfg: SearchConfig,
    reconstruct,
) -> Verdict:
    tol = cfg.tol
    try:
        logs = principal_logs(lam, layout, tol)
    except SingularSpectrum:
        return Verdict(False, SINGULAR)
    if _nonreal_selfconj(lam, layout, tol):
        return Verdict(False, NON_REAL)
    base = (h @ logs / scale).real
    # branch M on a pair adds 2 pi i M (h[:, rep] - h[:, partner]) / scale
    coeff = (2j * np.pi * (h[:, layout.reps] - h[:, layout.partners]) / scale).real
    rows = np.arange(1, layout.size)
    res = search_branches(
        base, coeff, rows, layout.reps, layout.partners, cfg.mmax, cfg.budget, tol.time
    )
    if res.m is None:
        return Verdict(False, BUDGET if res.exhausted else NEGATIVE_TIME)
    t = np.real(_raw_times(logs, res.m, layout, h, scale))
    t[0] = 0.0
    t = np.where(t < 0, 0.0, t)
    residual = reconstruct(t)
    return Verdict(True, OK, t, expand_branch(res.m, layout), residual)


def decide_accessibility(ch: WeylChannel, cfg: SearchConfig = DEFAULT_SEARCH) -> Verdict:
    """Decide whether ``ch`` lies on some Lindblad semigroup of Weyl jumps.

    The verdict is exact whenever the box of branch integers compatible with
    the two-sided bound fits inside ``|M| <= cfg.mmax`` and the node budget;
    otherwise a negative outcome is reported as ``BudgetExhausted``.  On
    success the witness times are clamped at 0 and ``residual`` is the max
    deviation of the reconstructed probabilities.
    """
    n = ch.n
    lam = spectrum_from_probabilities(ch)

    def reconstruct(t):
        return float(np.abs(channel_from_times(t, n, cfg.tol).p - ch.p).max())

    return _decide(lam, _hadamard(n), n * n, weyl_pairs(n), cfg, reconstruct)


def necessary_modulus_values(lam: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``sum_{kl} H[(mn),(kl)] log r_kl`` for every ``(m, n)``."""
    lam = np.asarray(lam, dtype=complex).reshape(-1)
    n = int(round(np.sqrt(lam.size)))
    r = np.abs(lam)
    if np.any(r <= tol.zero):
        raise SingularSpectrum("zero eigenvalue; no finite logarithm")
    return (_hadamard(n) @ np.log(r)).real


def necessary_modulus_condition(lam: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Whether the branch-free necessary condition on moduli holds."""
    return bool(np.all(necessary_modulus_values(lam, tol)[1:] >= -tol.time))


def _is_weyl_diagonal(sup: np.ndarray, n: int, tol: ToleranceConfig):
    us = _weyl_stack(n).reshape(n * n, -1)
    ell = np.einsum("ma,ab,mb->m", us.conj(), sup, us) / n
    rebuilt = np.einsum("m,ma,mb->ab", ell, us, us.conj()) / n
    if np.abs(rebuilt - sup).max() > tol.residual:
        return None
    return ell


def validate_lindblad(
    sup: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL, method: str = "auto"
) -> bool:
    """Check that ``sup`` generates a quantum dynamical semigroup.

    Tests Hermiticity preservation, trace preservation and conditional
    complete positivity.  CCP is decided analytically when ``sup`` is
    diagonal in the Weyl basis (``method="auto"``), otherwise (or with
    ``method="jacobi"``) from the smallest eigenvalue of the reshuffled
    generator projected off the maximally entangled vector.
    """
    sup = np.asarray(sup, dtype=complex)
    d2 = sup.shape[0]
    n = int(round(np.sqrt(d2)))
    if sup.ndim != 2 or sup.shape != (d2, d2) or n * n != d2:
        raise WeylError(f"generator must be square of order N**2, got {sup.shape}")
    t4 = sup.reshape(n, n, n, n)
    if np.abs(t4 - t4.transpose(1, 0, 3, 2).conj()).max() > tol.residual:
        return False
    if np.abs(np.einsum("mmab->ab", t4)).max() > tol.residual:
        return False

    if method == "auto":
        ell = _is_weyl_diagonal(sup, n, tol)
        if ell is not None:
            c = _hadamard(n) @ ell / (n * n)
            return bool(np.all(c[1:].real >= -tol.time))
    elif method != "jacobi":
        raise ValueError(f"unknown method {method!r}")

    psi = np.eye(n).reshape(-1) / np.sqrt(n)
    q = np.eye(d2) - np.outer(psi, psi.conj())
    proj = q @ reshuffle(sup) @ q
    return bool(linalg.jacobi_eigvalsh(proj)[0] >= -tol.time)


def log_generator(ch: WeylChannel, branch: np.ndarray | None = None, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Superoperator ``log Phi`` on the given branch (principal by default)."""
    n = ch.n
    layout = weyl_pairs(n)
    logs = principal_logs(spectrum_from_probabilities(ch), layout, tol)
    if branch is not None:
        logs = logs + 2j * np.pi * np.asarray(branch, dtype=float)
    us = _weyl_stack(n).reshape(n * n, -1)
    return np.einsum("m,ma,mb->ab", logs, us, us.conj()) / n


def semigroup_superoperator(t: np.ndarray, n: int) -> np.ndarray:
    """Brute-force ``expm(sum t_mu L_mu)`` by scaling and squaring."""
    return linalg.expm(generator_from_times(t, n))


def probabilities_of_superoperator(sup: np.ndarray, n: int) -> np.ndarray:
    """Weyl weights of a superoperator that is a combination of ``U (x) conj(U)``."""
    us = _weyl_stack(n).reshape(n * n, -1)
    # <<U_mu| Phi^R |U_mu>> = N^2 p_mu
    return np.einsum("ma,ab,mb->m", us.conj(), reshuffle(sup), us).real / (n * n)


def _face_weights(tx: float, ty: float) -> np.ndarray:
    e = np.exp(-1.5 * (tx + ty))
    cs = np.cos(np.sqrt(3) / 2 * (tx - ty))
    sn = np.sin(np.sqrt(3) / 2 * (tx - ty))
    return np.array(
        [
            (1 + 2 * e * cs) / 3,
            (1 - e * cs + np.sqrt(3) * e * sn) / 3,
            (1 - e * cs - np.sqrt(3) * e * sn) / 3,
        ]
    )


def product_face_vector(
    t_a: float,
    t_b: float,
    t_alpha: float,
    t_beta: float,
    indices: tuple[int, int, int, int] = (1, 2, 3, 6),
) -> np.ndarray:
    """Probabilities of the N=3 channel driven by two conjugate generator pairs.

    ``indices = (a, b, alpha, beta)`` with ``U_b ~ U_a^dagger`` and
    ``U_beta ~ U_alpha^dagger``.  The channel factorises into a local weight
    vector ``w(a, b)`` over ``(I, U_a, U_b)`` times ``w(alpha, beta)`` over
    ``(I, U_alpha, U_beta)``; the product is mapped back to the Weyl order.
    """
    a, b, al, be = indices
    n = 3
    for x, y in ((a, b), (al, be)):
        if not (1 <= x < 9 and 1 <= y < 9) or conjugate_index(n, x) != y:
            raise WeylError(f"indices {x}, {y} are not a conjugate pair")
    if al in (a, b):
        raise WeylError("the two generator pairs must be distinct")
    if min(t_a, t_b, t_alpha, t_beta) < 0:
        raise WeylError("interaction times must be non-negative")
    w1 = _face_weights(t_a, t_b)
    w2 = _face_weights(t_alpha, t_beta)
    ka, la = divmod(a, n)  # weight index 1 sits on U_a, index 2 on U_a^2 ~ U_b
    kb, lb = divmod(al, n)
    p = np.zeros(n * n)
    for i in range(n):
        for j in range(n):
            k = (i * ka + j * kb) % n
            l = (i * la + j * lb) % n
            p[k * n + l] += w1[i] * w2[j]
    return p


def conjugate_pairs(n: int) -> list[tuple[int, int]]:
    lay = weyl_pairs(n)
    return list(zip(lay.reps.tolist(), lay.partners.tolist()))


def star_shift(t: np.ndarray, m: float, n: int) -> np.ndarray:
    """Witness for ``m Phi + (1 - m) Phi_*`` given a witness ``t`` for ``Phi``."""
    if not 0 < m <= 1:
        raise WeylError("mixing weight must lie in (0, 1]")
    out = np.asarray(t, dtype=float) - np.log(m) / (n * n)
    out[0] = 0.0
    return out


__all__ = [
    "Verdict",
    "lindblad_generator",
    "generator_from_times",
    "channel_from_times",
    "spectrum_from_times",
    "accessibility_times",
    "decide_accessibility",
    "necessary_modulus_condition",
    "necessary_modulus_values",
    "validate_lindblad",
    "log_generator",
    "semigroup_superoperator",
    "probabilities_of_superoperator",
    "product_face_vector",
    "conjugate_pairs",
    "star_shift",
]
