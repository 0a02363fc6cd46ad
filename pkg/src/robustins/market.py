"""Exogenous model primitives and elementary closed forms.

Everything downstream consumes :class:`MarketParams` and
:class:`AmbiguityBand`; both validate on construction and are immutable, so
the operations in this package assume their invariants hold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import AdmissibilityError, DomainError

ADMISSIBILITY_MARGIN = 1e-9


@dataclass(frozen=True)
class MarketParams:
    """Insurance market, financial market, preferences and horizon.

    Rates are per year and the horizon is measured in years.
    """

    l: float  # expected loss rate
    eta: float  # loss volatility
    r: float  # risk-free rate
    mu: float  # risky drift
    sigma: float  # risky volatility
    alpha: float  # policyholder risk aversion
    gamma: float  # insurer risk aversion
    t0: float = 0.0
    T: float = 50.0

    def __post_init__(self):
        for name in ("l", "eta", "r", "mu", "sigma", "alpha", "gamma", "t0", "T"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise AdmissibilityError(f"{name} must be finite, got {value!r}")
        for name in ("l", "eta", "sigma", "alpha", "gamma"):
            if getattr(self, name) <= 0:
                raise AdmissibilityError(f"{name} must be positive, got {getattr(self, name)!r}")
        if not self.mu > self.r:
            raise AdmissibilityError("mu must exceed r")
        if not self.T > self.t0:
            raise AdmissibilityError("T must exceed t0")

    @classmethod
    def benchmark(cls) -> "MarketParams":
        """Benchmark calibration (l=1, eta=0.28, r=1.5%, mu=3.5%, sigma=0.18, alpha=gamma=2, T=50)."""
        return cls(l=1.0, eta=0.28, r=0.015, mu=0.035, sigma=0.18, alpha=2.0, gamma=2.0, t0=0.0, T=50.0)

    @property
    def excess_return(self) -> float:
        return self.mu - self.r

    def replace(self, **changes) -> "MarketParams":
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        values.update(changes)
        return MarketParams(**values)


def is_admissible(rho: float, phi: float, margin: float = ADMISSIBILITY_MARGIN) -> bool:
    """True when both effective correlations rho +/- phi lie strictly inside (-1, 1)."""
    if not (math.isfinite(rho) and math.isfinite(phi)) or phi < 0:
        return False
    return abs(rho + phi) <= 1.0 - margin and abs(rho - phi) <= 1.0 - margin


@dataclass(frozen=True)
class AmbiguityBand:
    """Reference correlation ``rho`` and ambiguity radius ``phi``.

    Construction rejects bands with ``|rho +/- phi|`` within ``margin`` of 1.
    :meth:`with_clipping` is the opt-in alternative that shrinks ``phi`` instead and
    sets ``clipped=True``.
    """

    rho: float
    phi: float
    margin: float = field(default=ADMISSIBILITY_MARGIN, compare=False)
    clipped: bool = field(default=False, compare=False)

    def __post_init__(self):
        if not math.isfinite(self.rho) or abs(self.rho) >= 1.0:
            raise AdmissibilityError(f"rho must lie in (-1, 1), got {self.rho!r}")
        if not math.isfinite(self.phi) or self.phi < 0:
            raise AdmissibilityError(f"phi must be non-negative, got {self.phi!r}")
        if not is_admissible(self.rho, self.phi, self.margin):
            raise AdmissibilityError(
                f"inadmissible band: |rho+phi|={abs(self.rho + self.phi):.12g}, "
                f"|rho-phi|={abs(self.rho - self.phi):.12g} must be below 1 - {self.margin:g}"
            )

    @classmethod
    def with_clipping(cls, rho: float, phi: float, margin: float = ADMISSIBILITY_MARGIN) -> "AmbiguityBand":
        """Build a band, shrinking ``phi`` to the largest admissible radius if needed."""
        if is_admissible(rho, phi, margin):
            return cls(rho, phi, margin)
        limit = 1.0 - margin - abs(rho)
        if limit < 0:
            raise AdmissibilityError(f"rho={rho!r} leaves no admissible radius")
        return cls(rho, min(phi, limit), margin, clipped=True)

    @property
    def upper(self) -> float:
        """Largest admissible correlation ``rho + phi``."""
        return self.rho + self.phi

    @property
    def lower(self) -> float:
        """Smallest admissible correlation ``rho - phi``."""
        return self.rho - self.phi


@dataclass(frozen=True)
class PriceBounds:
    lower: float
    upper: float


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing decision times."""

    times: tuple

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        if not times:
            raise DomainError("time grid is empty")
        if any(not math.isfinite(t) for t in times):
            raise DomainError("time grid contains non-finite values")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("time grid must be strictly increasing")
        object.__setattr__(self, "times", times)

    @classmethod
    def uniform(cls, start: float, stop: float, step: float) -> "TimeGrid":
        """Grid from ``start`` to ``stop`` inclusive; the last step may be short."""
        if step <= 0:
            raise DomainError("step must be positive")
        n = int(math.floor((stop - start) / step + 1e-9))
        times = [start + i * step for i in range(n + 1)]
        if stop - times[-1] > 1e-9 * max(1.0, abs(stop)):
            times.append(stop)
        else:
            times[-1] = stop
        return cls(tuple(times))

    def check_within(self, params: MarketParams) -> None:
        if self.times[0] < params.t0 or self.times[-1] > params.T:
            raise DomainError(
                f"time grid [{self.times[0]:g}, {self.times[-1]:g}] leaves [{params.t0:g}, {params.T:g}]"
            )

    def __len__(self):
        return len(self.times)

    def __iter__(self):
        return iter(self.times)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.times)


def price_upper_bound(params: MarketParams) -> float:
    return params.alpha * params.eta**2 / params.l


def price_bounds(params: MarketParams) -> PriceBounds:
    return PriceBounds(0.0, price_upper_bound(params))


def demand(theta: float, params: MarketParams) -> float:
    """Policyholder coverage fraction ``1 - l theta / (alpha eta^2)``."""
    upper = price_upper_bound(params)
    if theta < 0.0:
        raise DomainError(f"theta={theta!r} is below the lower price bound 0")
    if theta > upper:
        raise DomainError(f"theta={theta!r} exceeds the upper price bound {upper!r}")
    return 1.0 - theta / upper


def profitability_psi(theta: float, params: MarketParams) -> float:
    """Underwriting gain per unit loss risk relative to the Sharpe ratio."""
    return (theta * params.l / params.eta) * (params.sigma / params.excess_return)


def sharpe_ratio(params: MarketParams) -> float:
    return params.excess_return / params.sigma


def zero_underwriting_threshold(params: MarketParams) -> float:
    """``alpha eta sigma / (mu - r)``: profitability ratio at the upper price bound."""
    return params.alpha * params.eta * params.sigma / params.excess_return

