"""Unistochastic matrices and channels for qutrits.

Dilations ``U`` of order ``N * d`` act on a bipartite space and
:func:`dilation_superoperator` gives the plain partial-trace channel
``Tr_E U (rho (x) I/d) U^dagger`` with the environment as the first
(``env="first"``) or second (``env="second"``) tensor factor.

Two fixed conventions sit on top of it:

* :func:`channel_from_dilation` uses the Choi matrix ``(U^R)^dagger U^R / N``.
  With this package's row-major vectorisation that is the env-first
  channel of ``conj(U)``; for instance ``diag(1,1,1,1,1,1,w,1,w^2)`` then
  generates ``2/3 Phi_I + 1/3 Phi_Z``.
* :func:`transition_from_dilation` uses
  ``T_ij = (1/N) sum_bc |U[(i b), (j c)]|^2``, i.e. the system is the first
  factor, so ``U = V (x) I`` gives ``T = V o conj(V)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, NotUnistochastic, ToleranceConfig, TriangleViolation, WeylError
from .weyl import WeylChannel, _weyl_stack, omega, reshuffle, superoperator_of

SQRT3 = math.sqrt(3.0)


# ---------------------------------------------------------------- Jarlskog


def bistochastic3(b) -> np.ndarray:
    """Full 3x3 matrix from ``(b1, b2, b3, b4)`` or a 3x3 array."""
    b = np.asarray(b, dtype=float)
    if b.shape == (4,):
        b1, b2, b3, b4 = b
        return np.array(
            [
                [b1, b2, 1 - b1 - b2],
                [b3, b4, 1 - b3 - b4],
                [1 - b1 - b3, 1 - b2 - b4, b1 + b2 + b3 + b4 - 1],
            ]
        )
    if b.shape == (3, 3):
        return b.copy()
    raise WeylError(f"need four parameters or a 3x3 matrix, got shape {b.shape}")


def check_bistochastic(m: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> None:
    if np.any(m < -tol.simplex) or np.any(m > 1 + tol.simplex):
        raise WeylError("bistochastic entries must lie in [0, 1]")
    if np.abs(m.sum(axis=0) - 1).max() > tol.simplex or np.abs(m.sum(axis=1) - 1).max() > tol.simplex:
        raise WeylError("rows and columns must sum to 1")


def jarlskog_Q(b, tol: ToleranceConfig = DEFAULT_TOL) -> float:
    """``Q = 4 b1 b2 b3 b4 - (b1 + b2 + b3 + b4 - 1 - b1 b4 - b2 b3)^2``.

    ``Q >= 0`` iff the 3x3 bistochastic matrix is unistochastic.
    """
    m = bistochastic3(b)
    check_bistochastic(m, tol)
    b1, b2, b3, b4 = m[0, 0], m[0, 1], m[1, 0], m[1, 1]
    return float(4 * b1 * b2 * b3 * b4 - (b1 + b2 + b3 + b4 - 1 - b1 * b4 - b2 * b3) ** 2)


def _close_triangle(a: np.ndarray) -> np.ndarray:
    """Phases ``phi`` (``phi[0] = 0``) with ``sum a_i exp(i phi_i) = 0``."""
    a0, a1, a2 = a
    if a0 * a1 > 1e-300:
        c = (a2 * a2 - a0 * a0 - a1 * a1) / (2 * a0 * a1)
        phi1 = math.acos(min(1.0, max(-1.0, c)))
    else:
        phi1 = math.pi
    rest = -(a0 + a1 * np.exp(1j * phi1))
    phi2 = float(np.angle(rest)) if a2 > 0 else 0.0
    return np.array([0.0, phi1, phi2])


def unitary_from_bistochastic3(b, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Unitary ``V`` with ``|V_ij|^2 = B_ij``.

    The first column is real; the second gets the phases that close the
    unitarity triangle of sides ``sqrt(B_i1 B_i2)``; the third is the
    conjugated cross product of the first two.

    Raises:
        NotUnistochastic: ``Q(B) < 0`` beyond tolerance.
    """
    m = bistochastic3(b)
    if jarlskog_Q(m, tol) < -tol.simplex:
        raise NotUnistochastic(f"Q = {jarlskog_Q(m, tol):.6g} < 0")
    m = np.clip(m, 0.0, 1.0)
    c1 = np.sqrt(m[:, 0]).astype(complex)
    phi = _close_triangle(np.sqrt(m[:, 0] * m[:, 1]))
    c2 = np.sqrt(m[:, 1]) * np.exp(1j * phi)
    c3 = np.conj(np.cross(c1, c2))
    v = np.column_stack([c1, c2, c3])
    if np.abs(v.conj().T @ v - np.eye(3)).max() > 1e-8:
        raise NotUnistochastic("unitarity triangle does not close within tolerance")
    return v


# ---------------------------------------------------------------- face regions


def hypocycloid_value(p) -> float:
    """``4 p1^2 p3 p2 - (p1 - p1^2 - p3 p2)^2`` for ``p3 = 1 - p1 - p2``.

    Equals the Jarlskog ``Q`` of ``p1 I + p2 X + p3 X^2``.
    """
    p1, p2 = float(p[0]), float(p[1])
    p3 = 1.0 - p1 - p2
    return 4 * p1 * p1 * p3 * p2 - (p1 - p1 * p1 - p3 * p2) ** 2


def hypocycloid_test(p, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Inside (or on) the 3-hypocycloid of the face triangle."""
    return hypocycloid_value(p) >= -tol.simplex


def face_planar(p) -> tuple[float, float]:
    """Planar point of barycentric weights on vertices (0,0), (1,0), (1/2, sqrt3/2)."""
    p = np.asarray(p, dtype=float)
    return float(p[1] + 0.5 * p[2]), float(SQRT3 / 2 * p[2])


STAR_A = ((1 / 3, 0.0), (1 / 3, 1 / SQRT3), (5 / 6, 1 / (2 * SQRT3)))
STAR_B = ((2 / 3, 1 / SQRT3), (2 / 3, 0.0), (1 / 6, 1 / (2 * SQRT3)))


def _in_triangle(pt, tri, eps: float) -> bool:
    x, y = pt
    signs = []
    for (ax, ay), (bx, by) in zip(tri, tri[1:] + tri[:1]):
        signs.append((bx - ax) * (y - ay) - (by - ay) * (x - ax))
    signs = np.array(signs)
    return bool(np.all(signs >= -eps) or np.all(signs <= eps))


def david_star_test(p, tol: ToleranceConfig = DEFAULT_TOL) -> bool:
    """Planar point lies in one of the two star triangles (boundary included)."""
    pt = face_planar(p)
    return _in_triangle(pt, STAR_A, tol.simplex) or _in_triangle(pt, STAR_B, tol.simplex)


# ---------------------------------------------------------------- dilations


@dataclass(frozen=True)
class Dilation:
    """Unitary ``U`` of order ``n * d``."""

    u: np.ndarray
    n: int
    d: int

    def __post_init__(self) -> None:
        u = np.asarray(self.u, dtype=complex)
        if u.shape != (self.n * self.d, self.n * self.d):
            raise WeylError(f"dilation must have order {self.n * self.d}, got {u.shape}")
        object.__setattr__(self, "u", u)


def check_unitary(u: np.ndarray, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise WeylError(f"need a square matrix, got shape {u.shape}")
    if np.abs(u.conj().T @ u - np.eye(u.shape[0])).max() > tol.residual:
        raise WeylError("matrix is not unitary")
    return u


def swap_factors(u: np.ndarray, a: int, b: int) -> np.ndarray:
    """``S U S`` where ``S`` swaps the factors of ``C^a (x) C^b``."""
    u = np.asarray(u)
    return u.reshape(a, b, a, b).transpose(1, 0, 3, 2).reshape(a * b, a * b)


def dilation_superoperator(u: np.ndarray, n: int, d: int | None = None, env: str = "first",
                           tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """Superoperator of ``rho -> Tr_E U (rho (x) I/d) U^dagger`` (factor order per ``env``)."""
    u = check_unitary(u, tol)
    if d is None:
        d = u.shape[0] // n
    if n * d != u.shape[0]:
        raise WeylError(f"order {u.shape[0]} is not {n} x {d}")
    if env == "first":
        u4 = u.reshape(d, n, d, n)  # [b, i, c, j]
        kraus = u4.transpose(0, 2, 1, 3).reshape(d * d, n, n)
    elif env == "second":
        u4 = u.reshape(n, d, n, d)  # [i, b, j, c]
        kraus = u4.transpose(1, 3, 0, 2).reshape(d * d, n, n)
    else:
        raise ValueError(f"env must be 'first' or 'second', got {env!r}")
    return np.einsum("mij,mkl->ikjl", kraus, kraus.conj()).reshape(n * n, n * n) / d


def choi_from_dilation(u: np.ndarray, n: int) -> np.ndarray:
    """``(U^R)^dagger U^R / N`` for a dilation of order ``N^2``."""
    ur = reshuffle(np.asarray(u, dtype=complex))
    return ur.conj().T @ ur / n


@dataclass(frozen=True)
class DilatedChannel:
    """Channel generated by a dilation; ``p`` is set when it is a Weyl channel."""

    superop: np.ndarray
    n: int
    p: np.ndarray | None
    weyl_residual: float

    def to_json(self) -> dict:
        from .io import matrix_to_json

        return {
            "n": self.n,
            "superoperator": matrix_to_json(self.superop),
            "p": None if self.p is None else [float(x) for x in self.p],
            "weyl_residual": float(self.weyl_residual),
        }


def weyl_weights(sup: np.ndarray, n: int) -> tuple[np.ndarray, float]:
    """Best Weyl weights for a superoperator and the residual of that fit."""
    us = _weyl_stack(n).reshape(n * n, -1)
    p = np.einsum("ma,ab,mb->m", us.conj(), reshuffle(sup), us).real / (n * n)
    fit = np.einsum("m,mij,mkl->ikjl", p, _weyl_stack(n), _weyl_stack(n).conj()).reshape(n * n, n * n)
    return p, float(np.abs(fit - sup).max())


def channel_from_dilation(u: np.ndarray, n: int | None = None, d: int | None = None,
                          tol: ToleranceConfig = DEFAULT_TOL) -> DilatedChannel:
    """Channel whose Choi matrix is ``(U^R)^dagger U^R / N``.

    ``n`` defaults to ``sqrt(order)`` with ``d = n``; for other environment
    sizes the same convention (env-first channel of ``conj(U)``) is used.
    """
    u = np.asarray(u, dtype=complex)
    if n is None:
        n = int(round(math.sqrt(u.shape[0])))
        if n * n != u.shape[0]:
            raise WeylError("give n explicitly for non-square dilations")
    sup = dilation_superoperator(u.conj(), n, d, "first", tol)
    p, res = weyl_weights(sup, n)
    return DilatedChannel(sup, n, p if res <= 1e-8 else None, res)


def transition_from_dilation(u: np.ndarray, n: int | None = None, env: str = "second",
                             tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``T_ij = (1/N) sum_bc |U[(i b), (j c)]|^2`` (system first by default)."""
    u = check_unitary(u, tol)
    if n is None:
        n = int(round(math.sqrt(u.shape[0])))
    if n * n != u.shape[0]:
        raise WeylError(f"transition matrix needs a dilation of order N^2, got {u.shape}")
    if env == "first":
        u = swap_factors(u, n, n)
    elif env != "second":
        raise ValueError(f"env must be 'first' or 'second', got {env!r}")
    return (np.abs(u.reshape(n, n, n, n)) ** 2).sum(axis=(1, 3)) / n


def k_unistochastic_coarse_grain(u: np.ndarray, n: int, k: int, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``B = L^T (U o conj(U)) L`` with ``L = I_N (x) |phi_k>``, ``phi_k`` uniform."""
    u = check_unitary(u, tol)
    if u.shape[0] != n * k:
        raise WeylError(f"need a unitary of order {n * k}, got {u.shape}")
    ell = np.kron(np.eye(n), np.full((k, 1), 1 / math.sqrt(k)))
    return ell.T @ (np.abs(u) ** 2) @ ell


# ---------------------------------------------------------------- face constructions


def face_channel_dilation(p, tol: ToleranceConfig = DEFAULT_TOL) -> np.ndarray:
    """``U = sum_j sqrt(p_j) e^{i theta_j} X^j (x) X^j`` generating ``sum_j p_j Phi_{X^j}``.

    Unitarity requires ``sum_j conj(c_j) c_{j+1} = 0``, a closed triangle with
    sides ``sqrt(p0 p1), sqrt(p1 p2), sqrt(p2 p0)``.

    Raises:
        TriangleViolation: ``p`` lies outside the hypocycloid.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (3,) or np.any(p < -tol.simplex) or abs(p.sum() - 1) > tol.simplex:
        raise WeylError(f"need a probability vector of length 3, got {p.tolist()}")
    p = np.clip(p, 0.0, None)
    sides = np.sqrt(np.array([p[0] * p[1], p[1] * p[2], p[2] * p[0]]))
    if hypocycloid_value(p) < -tol.simplex:
        raise TriangleViolation(f"sides {sides.tolist()} cannot close a triangle")
    # exp(i a) s0 + exp(i b) s1 + exp(i c) s2 = 0 with a = th1 - th0, b = th2 - th1, c = th0 - th2
    phi = _close_triangle(sides)
    shift = -phi.sum() / 3  # rotating all three keeps closure and makes the angles sum to 0
    a, b, _ = phi + shift
    theta = np.array([0.0, a, a + b])
    coef = np.sqrt(p) * np.exp(1j * theta)
    x = _weyl_stack(3)[3]
    u = np.zeros((9, 9), dtype=complex)
    xj = np.eye(3)
    for c in coef:
        u += c * np.kron(xj, xj)
        xj = x @ xj
    if np.abs(u.conj().T @ u - np.eye(9)).max() > 1e-8:
        raise TriangleViolation("dilation is not unitary within tolerance")
    return u


def fourier3() -> np.ndarray:
    """``F[m, l] = w^(m l) / sqrt(3)``."""
    return omega(3) ** (np.outer(np.arange(3), np.arange(3)) % 3) / SQRT3


def fourier_conjugate_dilation(u: np.ndarray) -> np.ndarray:
    """``(F (x) F) U (conj(F) (x) conj(F))``: maps the (I, Z, Z^2) face to (I, X, X^2)."""
    u = np.asarray(u, dtype=complex)
    if u.shape != (9, 9):
        raise WeylError(f"need a unitary of order 9, got {u.shape}")
    ff = np.kron(fourier3(), fourier3())
    return ff @ u @ ff.conj()


def corner_unitary() -> np.ndarray:
    """``diag(1,1,1,1,1,1,w,1,w^2)``, a dilation of ``2/3 Phi_I + 1/3 Phi_Z``."""
    w = omega(3)
    return np.diag([1, 1, 1, 1, 1, 1, w, 1, w * w]).astype(complex)


def star_corner_unitaries() -> list[tuple[np.ndarray, np.ndarray]]:
    """The six corner dilations of the (I, X, X^2) face with their weights.

    Each entry is ``(U, (p_I, p_X, p_X2))`` for
    ``U = (F (x) F)(Z^a (x) Z^a) U_c^{(bar)} (conj(F) (x) conj(F))``.
    """
    uc = corner_unitary()
    z = _weyl_stack(3)[1]
    claimed = {
        (0, False): (2 / 3, 1 / 3, 0.0),
        (0, True): (2 / 3, 0.0, 1 / 3),
        (1, False): (1 / 3, 0.0, 2 / 3),
        (1, True): (0.0, 1 / 3, 2 / 3),
        (2, False): (0.0, 2 / 3, 1 / 3),
        (2, True): (1 / 3, 2 / 3, 0.0),
    }
    out = []
    for a in range(3):
        za = np.linalg.matrix_power(z, a)
        for bar in (False, True):
            core = np.kron(za, za) @ (uc.conj() if bar else uc)
            out.append((fourier_conjugate_dilation(core), np.array(claimed[(a, bar)])))
    return out


def face_weights(p9: np.ndarray, face: str = "X") -> np.ndarray:
    """Weights of a 9-vector on the (I, X, X^2) or (I, Z, Z^2) face."""
    idx = [0, 3, 6] if face == "X" else [0, 1, 2]
    return np.asarray(p9)[idx]


def face_channel(p, face: str = "X") -> WeylChannel:
    """Weyl channel ``p1 Phi_I + p2 Phi_{A} + p3 Phi_{A^2}`` with ``A`` = X or Z."""
    p9 = np.zeros(9)
    p9[[0, 3, 6] if face == "X" else [0, 1, 2]] = p
    return WeylChannel.validated(3, p9)


# ---------------------------------------------------------------- Z-face search


def z_face_overlap(p) -> complex:
    """``s = (3 p1 - 1)/2 + i sqrt3/2 (p1 + 2 p2 - 1)``, i.e. ``p1 + p2 w + p3 w^2``."""
    p1, p2 = float(p[0]), float(p[1])
    return complex(0.5 * (3 * p1 - 1), SQRT3 / 2 * (p1 + 2 * p2 - 1))


def z_face_targets(p) -> np.ndarray:
    """Required ``(tr W2^+ W1, tr W3^+ W1, tr W3^+ W2)`` for block dilations.

    For ``U = sum_j |j><j| (x) W_j`` acting on system (x) environment the
    coherence ``rho_{j j'}`` is multiplied by ``tr(W_j'^dagger W_j) / 3``,
    which must equal ``p1 + p2 w^(j-j') + p3 w^(2(j-j'))``.
    """
    s = z_face_overlap(p)
    return 3 * np.array([np.conj(s), s, np.conj(s)])


def _expi_herm(x: np.ndarray) -> np.ndarray:
    h = np.zeros((3, 3), dtype=complex)
    h[np.diag_indices(3)] = x[:3]
    iu = np.triu_indices(3, 1)
    h[iu] = x[3:6] + 1j * x[6:9]
    h = h + np.triu(h, 1).conj().T
    evals, vecs = np.linalg.eigh(h)
    return (vecs * np.exp(1j * evals)) @ vecs.conj().T


def _z_blocks(x: np.ndarray) -> list[np.ndarray]:
    # gauge: W1 = I, W2 diagonal (environment unitaries on both sides)
    return [np.eye(3, dtype=complex), np.diag(np.exp(1j * x[:3])), _expi_herm(x[3:12])]


def _z_residual(x: np.ndarray, targets: np.ndarray) -> np.ndarray:
    w1, w2, w3 = _z_blocks(x)
    got = np.array([np.trace(w2.conj().T @ w1), np.trace(w3.conj().T @ w1), np.trace(w3.conj().T @ w2)])
    diff = got - targets
    return np.concatenate([diff.real, diff.imag])


@dataclass(frozen=True)
class SearchOutcome:
    found: bool
    blocks: list | None
    dilation: np.ndarray | None
    best_residual: float
    restarts: int
    seed: int

    def to_json(self) -> dict:
        return {
            "found": self.found,
            "status": "found" if self.found else "not-found-within-budget",
            "best_residual": float(self.best_residual),
            "restarts": self.restarts,
            "seed": self.seed,
        }


def dilation_search_z_face(p, budget: int = 256, seed: int = 0, tol: float = 1e-6) -> SearchOutcome:
    """Random-restart least-squares search for a block dilation of a Z-face channel.

    Looks for ``W2`` diagonal and ``W3`` in U(3) (``W1 = I`` by gauge) meeting
    :func:`z_face_targets` within ``tol``.  A failure is only evidence, not a
    proof, that no dilation exists.
    """
    from scipy.optimize import least_squares

    targets = z_face_targets(p)
    rng = np.random.default_rng(seed)
    best = math.inf
    for r in range(budget):
        x0 = rng.uniform(-math.pi, math.pi, 12)
        sol = least_squares(_z_residual, x0, args=(targets,), xtol=1e-14, ftol=1e-14, gtol=1e-14)
        err = float(np.abs(_z_residual(sol.x, targets)).max())
        best = min(best, err)
        if err <= tol:
            blocks = _z_blocks(sol.x)
            u = np.zeros((9, 9), dtype=complex)
            for j, w in enumerate(blocks):
                e = np.zeros((3, 3))
                e[j, j] = 1.0
                u += np.kron(e, w)
            return SearchOutcome(True, blocks, u, err, r + 1, seed)
    return SearchOutcome(False, None, None, best, budget, seed)


def dilation_reproduces(u: np.ndarray, p, face: str = "Z", env: str = "second") -> float:
    """Max deviation between the dilation's channel and the face channel ``p``."""
    target = superoperator_of(face_channel(p, face))
    return float(np.abs(dilation_superoperator(u, 3, 3, env) - target).max())
