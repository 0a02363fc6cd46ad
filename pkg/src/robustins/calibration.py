"""Ambiguity radius from a Fisher-z confidence interval of a sample correlation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np
from scipy.special import erfc

from .errors import DomainError
from .market import ADMISSIBILITY_MARGIN, AmbiguityBand, is_admissible

DEFAULT_RHOS = tuple(round(-0.9 + 0.1 * i, 10) for i in range(19))
DEFAULT_CONFIDENCES = (0.80, 0.90, 0.95, 0.99)

# Acklam's rational approximation to the normal quantile (relative error < 1.2e-9).
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class CalibrationInput:
    rho_hat: float
    n: int
    confidence: float

    def __post_init__(self):
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 4:
            raise DomainError(f"n must be an integer >= 4, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        if not math.isfinite(self.rho_hat) or abs(self.rho_hat) >= 1:
            raise DomainError(f"rho_hat must lie in (-1, 1), got {self.rho_hat!r}")
        if not 0 < self.confidence < 1:
            raise DomainError(f"confidence must lie in (0, 1), got {self.confidence!r}")


@dataclass(frozen=True)
class CalibratedBand:
    """Back-transformed interval and the radius covering it.

    ``band`` is ``None`` when ``|rho_hat +/- phi|`` reaches 1; the equilibrium
    engine cannot use such a radius.
    """

    rho_hat: float
    n: int
    confidence: float
    z: float
    half_width: float
    rho_lo: float
    rho_hi: float
    phi: float
    band: Optional[AmbiguityBand]

    @property
    def admissible(self) -> bool:
        return self.band is not None


def fisher_z(rho: float) -> float:
    if not abs(rho) < 1:
        raise DomainError(f"|rho| must be below 1, got {rho!r}")
    return 0.5 * math.log((1.0 + rho) / (1.0 - rho))


def inverse_fisher(z: float) -> float:
    return math.tanh(z)


def _acklam(p: float) -> float:
    if p < _P_LOW:
        q = math.sqrt(-2.0 * math.log(p))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        return num / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)
    if p > 1.0 - _P_LOW:
        return -_acklam(1.0 - p)
    q = p - 0.5
    t = q * q
    num = (((((_A[0] * t + _A[1]) * t + _A[2]) * t + _A[3]) * t + _A[4]) * t + _A[5]) * q
    return num / (((((_B[0] * t + _B[1]) * t + _B[2]) * t + _B[3]) * t + _B[4]) * t + 1.0)


def normal_quantile(p: float) -> float:
    """Standard normal quantile: rational approximation plus one Newton step."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p!r}")
    if p == 0.5:
        return 0.0
    if p > 0.5:
        # 1 - p is exact here; refining on the lower tail keeps the Newton step well conditioned
        return -normal_quantile(1.0 - p)
    x = _acklam(p)
    cdf = 0.5 * math.erfc(-x / _SQRT2)
    pdf = math.exp(-0.5 * x * x) / _SQRT2PI
    return x - (cdf - p) / pdf


def normal_quantile_array(p) -> np.ndarray:
    """Vectorized :func:`normal_quantile` for arrays in (0, 1)."""
    p = np.asarray(p, dtype=float)
    if np.any((p <= 0) | (p >= 1)):
        raise DomainError("p must lie in (0, 1)")
    upper = p > 0.5
    p = np.where(upper, 1.0 - p, p)
    x = np.empty_like(p)
    low = p < _P_LOW
    mid = ~low

    q = p[mid] - 0.5
    t = q * q
    num = (((((_A[0] * t + _A[1]) * t + _A[2]) * t + _A[3]) * t + _A[4]) * t + _A[5]) * q
    x[mid] = num / (((((_B[0] * t + _B[1]) * t + _B[2]) * t + _B[3]) * t + _B[4]) * t + 1.0)
    q = np.sqrt(-2.0 * np.log(p[low]))
    num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
    x[low] = num / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0)

    cdf = 0.5 * erfc(-x / _SQRT2)
    pdf = np.exp(-0.5 * x * x) / _SQRT2PI
    x = x - (cdf - p) / pdf
    return np.where(upper, -x, x)


def ambiguity_radius(inp: CalibrationInput, margin: float = ADMISSIBILITY_MARGIN) -> CalibratedBand:
    z = fisher_z(inp.rho_hat)
    h = normal_quantile(1.0 - (1.0 - inp.confidence) / 2.0) / math.sqrt(inp.n - 3)
    rho_lo = inverse_fisher(z - h)
    rho_hi = inverse_fisher(z + h)
    phi = max(rho_hi - inp.rho_hat, inp.rho_hat - rho_lo)
    band = AmbiguityBand(inp.rho_hat, phi, margin) if is_admissible(inp.rho_hat, phi, margin) else None
    return CalibratedBand(inp.rho_hat, inp.n, inp.confidence, z, h, rho_lo, rho_hi, phi, band)


def calibration_grid(
    rhos: Iterable[float] = DEFAULT_RHOS,
    confidences: Iterable[float] = DEFAULT_CONFIDENCES,
    n: int = 30,
) -> list:
    """Radius over a grid of reference correlations and confidence levels."""
    confidences = tuple(confidences)
    return [ambiguity_radius(CalibrationInput(rho, n, conf)) for rho in rhos for conf in confidences]
