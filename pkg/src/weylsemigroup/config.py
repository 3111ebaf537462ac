"""Tolerances, search settings and the package's exception types."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ToleranceConfig:
    """Numerical tolerances shared by every module.

    Attributes:
        simplex: slack on ``p >= 0`` and ``sum(p) == 1``.
        residual: Hermiticity / unitarity / eigenvector residuals.
        zero: an eigenvalue with modulus at or below this is treated as zero.
        time: slack on interaction times, ``t >= -time`` counts as non-negative.
        imag: largest imaginary part discarded when a result must be real.
    """

    simplex: float = 1e-9
    residual: float = 1e-10
    zero: float = 1e-12
    time: float = 1e-9
    imag: float = 1e-9


@dataclass(frozen=True)
class SearchConfig:
    """Logarithm-branch search settings.

    ``mmax`` bounds each independent branch integer, ``budget`` caps the
    number of branch vectors examined before giving up.
    """

    mmax: int = 3
    budget: int = 200_000
    tol: ToleranceConfig = field(default_factory=ToleranceConfig)


DEFAULT_TOL = ToleranceConfig()
DEFAULT_SEARCH = SearchConfig()


class WeylError(ValueError):
    """Base class for invalid-input errors raised by this package."""


class NonPhysicalSpectrum(WeylError):
    """A spectrum maps back to a vector with negative probabilities."""


class SingularSpectrum(WeylError):
    """Some eigenvalue is zero, so no finite logarithm exists."""


class NonRealTimes(WeylError):
    """Interaction times came out complex for the requested branch."""


class InvalidDensityMatrix(WeylError):
    pass


class UnsupportedShape(WeylError):
    """Input is not of the structured form an operation supports."""


class NotUnistochastic(WeylError):
    pass


class TriangleViolation(WeylError):
    """Side lengths cannot close a triangle."""
