"""Small dense kernels: matrix exponential and Hermitian eigenvalues.

Both are written out here instead of calling LAPACK so that they can serve
as independent oracles for the closed-form spectral maps elsewhere in the
package.
"""

from __future__ import annotations

import math

import numpy as np


def expm(a: np.ndarray, order: int = 18) -> np.ndarray:
    """Matrix exponential by scaling and squaring of a truncated Taylor series.

    The matrix is scaled by ``2**-s`` until its 1-norm is at most 1/2, the
    series is summed to ``order`` terms in Horner form, and the result is
    squared ``s`` times.  With the default order the truncation error of the
    scaled series is below 1e-22 relative.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expm needs a square matrix, got shape {a.shape}")
    n = a.shape[0]
    norm = np.abs(a).sum(axis=0).max() if n else 0.0
    s = max(0, int(math.ceil(math.log2(norm / 0.5)))) if norm > 0.5 else 0
    scaled = a / (2.0**s)
    eye = np.eye(n, dtype=np.result_type(a.dtype, float))
    result = eye.copy()
    for k in range(order, 0, -1):
        result = eye + scaled @ result / k
    for _ in range(s):
        result = result @ result
    return result


def jacobi_eigvalsh(
    a: np.ndarray, tol: float = 1e-12, max_sweeps: int = 60
) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations.

    Each (p, q) element is first made real by a diagonal phase on column q,
    then annihilated with a real Givens rotation.  Sweeps stop once the
    off-diagonal Frobenius norm is at most ``tol * max(1, ||a||_F)``.

    Returns:
        Eigenvalues in ascending order.
    """
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    if a.ndim != 2 or a.shape[1] != n:
        raise ValueError(f"need a square matrix, got shape {a.shape}")
    a = 0.5 * (a + a.conj().T)
    scale = max(1.0, float(np.linalg.norm(a)))

    off_mask = ~np.eye(n, dtype=bool)

    def off_norm(m: np.ndarray) -> float:
        return float(np.linalg.norm(m[off_mask]))

    for _ in range(max_sweeps):
        if off_norm(a) <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                # column q *= conj(phase), row q *= phase  ->  a[p, q] real
                a[:, q] *= phase.conjugate()
                a[q, :] *= phase
                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    return np.sort(np.diag(a).real)
