"""Support of spectra of accessible circulant maps: the logarithmic-spiral region."""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate

from .config import WeylError


def _decay(n: int) -> float:
    if n < 2:
        raise WeylError(f"dimension must be >= 2, got {n}")
    return math.tan(math.pi / n)


def spiral_boundary(n: int, t) -> np.ndarray:
    """Upper and lower boundary branches ``exp(+-i t - t tan(pi/N))``.

    Returns an array of shape ``(2, len(t))``.  For ``N = 2`` the region
    collapses to ``[0, 1]`` and every ``t > 0`` maps to 0.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0) or np.any(t > math.pi):
        raise WeylError("spiral parameter must lie in [0, pi]")
    if n == 2:
        r = np.where(t == 0, 1.0, 0.0)
    else:
        r = np.exp(-t * _decay(n))
    return np.stack([r * np.exp(1j * t), r * np.exp(-1j * t)])


def x_min(n: int) -> float:
    """Leftmost real point of the region, ``-exp(-pi tan(pi/N))`` (0 for N=2)."""
    if n == 2:
        return 0.0
    return -math.exp(-math.pi * _decay(n))


def spectral_support_contains(z, n: int, eps: float = 1e-12) -> np.ndarray:
    """Polar test ``|z| <= exp(-|arg z| tan(pi/N)) + eps``."""
    z = np.asarray(z, dtype=complex)
    if n == 2:
        return (np.abs(z.imag) <= eps) & (z.real >= -eps) & (z.real <= 1 + eps)
    theta = np.abs(np.angle(z))
    return np.abs(z) <= np.exp(-theta * _decay(n)) + eps


def spectral_support_area(n: int) -> float:
    """``(1 - exp(-2 pi tan(pi/N))) cot(pi/N) / 2``; 0 for N=2."""
    if n == 2:
        return 0.0
    a = _decay(n)
    return 0.5 * (1 - math.exp(-2 * math.pi * a)) / a


def spectral_support_area_quadrature(n: int) -> float:
    """Area as ``2 * int_0^pi x(t) y'(t) dt`` along the upper branch."""
    if n == 2:
        return 0.0
    a = _decay(n)

    def integrand(t):
        r = math.exp(-a * t)
        return r * math.cos(t) * r * (math.cos(t) - a * math.sin(t))

    val, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=1e-13, epsrel=1e-13, limit=200)
    return 2 * val
