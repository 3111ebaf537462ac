"""Monte Carlo over the simplex of Weyl channels, face scans and spectra scatter.

Randomness is counter based: sample ``i`` always comes from chunk
``i // CHUNK`` whose generator is seeded with ``(seed, chunk)``, so results
do not depend on how chunks are spread over threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .accessibility import _hadamard, channel_from_times, decide_accessibility, weyl_pairs
from .classical import classical_pairs, decide_embeddability, _fourier, Circulant
from .config import DEFAULT_SEARCH, SearchConfig, WeylError
from .geometry import spectral_support_contains
from .unistochastic import david_star_test, hypocycloid_value
from .weyl import WeylChannel

CHUNK = 4096


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(chunk)]))


def _spacings(rng: np.random.Generator, rows: int, size: int) -> np.ndarray:
    if size == 1:
        return np.ones((rows, 1))
    u = np.sort(rng.random((rows, size - 1)), axis=1)
    edges = np.concatenate([np.zeros((rows, 1)), u, np.ones((rows, 1))], axis=1)
    return np.diff(edges, axis=1)


def sample_simplex(size: int, count: int, seed: int = 0, start: int = 0) -> np.ndarray:
    """Flat-Dirichlet points with ``size`` components, samples ``start .. start+count-1``.

    Uses sorted-uniform spacings.  Sample ``i`` is the same for a given seed
    regardless of ``start`` and ``count``.
    """
    if size < 1 or count < 1:
        raise WeylError("need size >= 1 and count >= 1")
    out = np.empty((count, size))
    first, last = start // CHUNK, (start + count - 1) // CHUNK
    pos = 0
    for c in range(first, last + 1):
        block = _spacings(_chunk_rng(seed, c), CHUNK, size)
        lo = max(start, c * CHUNK) - c * CHUNK
        hi = min(start + count, (c + 1) * CHUNK) - c * CHUNK
        out[pos : pos + hi - lo] = block[lo:hi]
        pos += hi - lo
    return out


# ---------------------------------------------------------------- batched decisions


def _batched(lam: np.ndarray, h: np.ndarray, scale: float, layout, cfg: SearchConfig, scalar):
    """Vectorised version of the branch decision.

    Rows whose exact branch box is ``{0}`` (or empty) are settled here; any
    other row is handed to ``scalar``.  Returns ``(accessible, undecided)``.
    """
    tol = cfg.tol
    n_rows = lam.shape[0]
    acc = np.zeros(n_rows, dtype=bool)
    undecided = np.zeros(n_rows, dtype=bool)
    r = np.abs(lam)
    ok = np.all(r > tol.zero, axis=1)
    if layout.selfconj.size:
        ok &= np.all(lam[:, layout.selfconj].real >= 0, axis=1)
    idx = np.flatnonzero(ok)
    if idx.size == 0:
        return acc, undecided
    lam = lam[idx]
    theta = np.angle(lam)
    theta[theta <= -np.pi] = np.pi
    theta[:, layout.partners] = -theta[:, layout.reps]
    logs = np.log(np.abs(lam)) + 1j * theta
    logs[:, 0] = 0.0
    base = (logs @ h.T / scale).real
    eps = tol.time
    lo_y = -base[:, layout.reps] - eps
    hi_y = base[:, layout.partners] + eps
    feasible = np.all(hi_y >= lo_y, axis=1)
    coeff = (2j * np.pi * (h[:, layout.reps] - h[:, layout.partners]) / scale).real
    d = coeff[layout.reps]
    if d.shape[0] and np.linalg.matrix_rank(d) == d.shape[1]:
        dinv = np.linalg.inv(d)
        cen = (0.5 * (lo_y + hi_y)) @ dinv.T
        rad = (0.5 * (hi_y - lo_y)) @ np.abs(dinv).T
        lo = np.ceil(cen - rad - 1e-9)
        hi = np.floor(cen + rad + 1e-9)
        feasible &= np.all(hi >= lo, axis=1)
        zero_only = np.all((lo == 0) & (hi == 0), axis=1)
        other = feasible & ~zero_only
    elif d.shape[0] == 0:
        # no conjugate pairs: the only branch is M = 0
        zero_only = np.ones(len(idx), dtype=bool)
        other = np.zeros(len(idx), dtype=bool)
    else:
        zero_only = np.zeros(len(idx), dtype=bool)
        other = feasible
    at_zero = feasible & zero_only & np.all(base[:, 1:] >= -eps, axis=1)
    acc[idx[at_zero]] = True
    for j in np.flatnonzero(other):
        v = scalar(idx[j])
        acc[idx[j]] = v.accessible
        undecided[idx[j]] = v.reason == "BudgetExhausted"
    return acc, undecided


def accessible_mask(p: np.ndarray, n: int, cfg: SearchConfig = DEFAULT_SEARCH):
    """Accessibility of many channels at once; same verdicts as :func:`decide_accessibility`."""
    p = np.asarray(p, dtype=float)
    h = _hadamard(n)
    lam = p @ h.T

    def scalar(i):
        return decide_accessibility(WeylChannel(n, p[i]), cfg)

    return _batched(lam, h, n * n, weyl_pairs(n), cfg, scalar)


def embeddable_mask(q: np.ndarray, cfg: SearchConfig = DEFAULT_SEARCH):
    """Embeddability of many circulant weight vectors at once."""
    q = np.asarray(q, dtype=float)
    n = q.shape[1]
    f = _fourier(n)
    xi = q @ f.T

    def scalar(i):
        return decide_embeddability(Circulant(q[i]), cfg)

    return _batched(xi, f.conj(), n, classical_pairs(n), cfg, scalar)


# ---------------------------------------------------------------- volumes


@dataclass(frozen=True)
class VolumeEstimate:
    fraction: float
    stderr: float
    samples: int
    seed: int
    hits: int
    undecided: int = 0

    def to_json(self) -> dict:
        return {
            "fraction": self.fraction,
            "stderr": self.stderr,
            "samples": self.samples,
            "seed": self.seed,
            "hits": self.hits,
            "undecided": self.undecided,
        }


def _estimate(hits: int, undecided: int, samples: int, seed: int) -> VolumeEstimate:
    f = hits / samples
    return VolumeEstimate(f, math.sqrt(f * (1 - f) / samples), samples, seed, hits, undecided)


def _run_chunks(n_samples: int, work, threads: int) -> tuple[int, int]:
    chunks = range((n_samples + CHUNK - 1) // CHUNK)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(c) for c in chunks]
    return sum(r[0] for r in results), sum(r[1] for r in results)


def accessible_volume_fraction(
    n: int, samples: int, seed: int = 0, threads: int = 1, cfg: SearchConfig = DEFAULT_SEARCH
) -> VolumeEstimate:
    """Fraction of flat-simplex Weyl channels that are accessible."""
    if samples < 1:
        raise WeylError("need at least one sample")

    def work(c):
        count = min(CHUNK, samples - c * CHUNK)
        p = sample_simplex(n * n, count, seed, c * CHUNK)
        acc, und = accessible_mask(p, n, cfg)
        return int(acc.sum()), int(und.sum())

    hits, und = _run_chunks(samples, work, threads)
    return _estimate(hits, und, samples, seed)


def fixed_p0_fraction(
    n: int, p0: float, samples: int, seed: int = 0, threads: int = 1, cfg: SearchConfig = DEFAULT_SEARCH
) -> VolumeEstimate:
    """Accessible fraction of ``p = (p0, (1 - p0) phi)`` with ``phi`` flat on the face."""
    if not 0 <= p0 <= 1:
        raise WeylError("p0 must lie in [0, 1]")

    def work(c):
        count = min(CHUNK, samples - c * CHUNK)
        phi = sample_simplex(n * n - 1, count, seed, c * CHUNK)
        p = np.concatenate([np.full((count, 1), p0), (1 - p0) * phi], axis=1)
        acc, und = accessible_mask(p, n, cfg)
        return int(acc.sum()), int(und.sum())

    hits, und = _run_chunks(samples, work, threads)
    return _estimate(hits, und, samples, seed)


def qubit_volume_ratio() -> Fraction:
    """``V(A_2) / V(Delta_3)`` with ``V(A_2) = 1/(4^3 sqrt2)`` and ``V(Delta_3) = sqrt2/12``.

    The square roots cancel: ``(1/(64 sqrt2)) / (sqrt2/12) = 12 / (64 * 2)``.
    """
    return Fraction(12, 64 * 2)


# ---------------------------------------------------------------- face scans


@dataclass
class ScanGrid:
    """Per-cell verdicts on a barycentric triangle tiled by ``resolution**2`` cells."""

    resolution: int
    weights: np.ndarray  # (cells, 3) barycentric centre of each cell
    flags: dict

    def planar(self) -> np.ndarray:
        w = self.weights
        return np.stack([w[:, 1] + 0.5 * w[:, 2], math.sqrt(3) / 2 * w[:, 2]], axis=1)


def triangle_cell_centres(resolution: int) -> np.ndarray:
    """Barycentric centres of the ``resolution**2`` sub-triangles."""
    r = resolution
    out = []
    for i in range(r):
        for j in range(r - i):
            # upward cell with corners (i, j), (i+1, j), (i, j+1) in units of 1/r
            out.append((i + 1 / 3, j + 1 / 3))
            if j < r - i - 1:
                out.append((i + 2 / 3, j + 2 / 3))
    a = np.array(out) / r
    return np.stack([1 - a[:, 0] - a[:, 1], a[:, 0], a[:, 1]], axis=1)


SCAN_TESTS = ("accessible", "embeddable", "hypocycloid", "star", "spiral")


def cross_section_scan(
    face: list[WeylChannel],
    resolution: int = 512,
    tests=SCAN_TESTS,
    cfg: SearchConfig = DEFAULT_SEARCH,
) -> ScanGrid:
    """Evaluate region tests at the centre of every cell of a face triangle.

    ``hypocycloid`` and ``star`` read the barycentric weights directly (they
    are meaningful on the (I, X, X^2) face); ``spiral`` tests the first
    subleading circulant eigenvalue of the shadow.
    """
    if len(face) != 3 or len({ch.n for ch in face}) != 1:
        raise WeylError("face needs three channels of equal dimension")
    n = face[0].n
    w = triangle_cell_centres(resolution)
    verts = np.stack([ch.p for ch in face])
    p = w @ verts
    q = p.reshape(len(p), n, n).sum(axis=2)
    flags = {}
    for test in tests:
        if test == "accessible":
            flags[test] = accessible_mask(p, n, cfg)[0]
        elif test == "embeddable":
            flags[test] = embeddable_mask(q, cfg)[0]
        elif test == "hypocycloid":
            flags[test] = np.array([hypocycloid_value(x) >= -cfg.tol.simplex for x in w])
        elif test == "star":
            flags[test] = np.array([david_star_test(x, cfg.tol) for x in w])
        elif test == "spiral":
            xi = q @ _fourier(n).T
            flags[test] = np.all(spectral_support_contains(xi[:, 1:], n, 1e-12), axis=1)
        else:
            raise WeylError(f"unknown scan test {test!r}")
    return ScanGrid(resolution, w, flags)


# ---------------------------------------------------------------- scatter


ENSEMBLES = ("simplex", "x-face", "accessible")


def spectra_scatter(n: int, ensemble: str, count: int, seed: int = 0, time_scale: float = 0.5) -> np.ndarray:
    """All ``N**2`` eigenvalues of ``count`` random channels, flattened.

    ``simplex``: flat over all Weyl channels; ``x-face``: flat over
    ``Delta(Phi_I, Phi_X, ..., Phi_{X^{N-1}})``; ``accessible``: channels
    reached after exponentially distributed times with mean ``time_scale``.
    """
    h = _hadamard(n)
    if ensemble == "simplex":
        p = sample_simplex(n * n, count, seed)
    elif ensemble == "x-face":
        w = sample_simplex(n, count, seed)
        p = np.zeros((count, n * n))
        p[:, np.arange(n) * n] = w
    elif ensemble == "accessible":
        rng = _chunk_rng(seed, 0)
        t = rng.exponential(time_scale, (count, n * n))
        p = np.stack([channel_from_times(row, n).p for row in t])
    else:
        raise WeylError(f"unknown ensemble {ensemble!r}; choose from {ENSEMBLES}")
    return (p @ h.T).reshape(-1)
