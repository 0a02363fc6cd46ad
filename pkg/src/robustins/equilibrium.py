"""Competitive insurance-market equilibrium under correlation ambiguity.

At each time the market settles in one of five regimes. Which one depends on
how the effective correlations ``rho +/- phi`` compare with three boundary
functions of time:

``K``
    ``alpha eta sigma / (mu - r)``, the profitability ratio at the upper
    price bound (constant in time).
``H(s)``
    ``(mu - r)/(eta sigma) * (1/alpha + exp(-r(T-s))/gamma)``, the
    correlation at which the insurer holds no risky asset.
``Lb(s)``
    ``A - sqrt(A^2 + 1)`` with ``A = (mu - r)/(2 eta sigma gamma) exp(-r(T-s))``,
    below which the upper-distorted price turns negative.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ClassificationError, DomainError
from .market import (
    AmbiguityBand,
    MarketParams,
    TimeGrid,
    demand,
    price_upper_bound,
    zero_underwriting_threshold,
)
from .strategy import StrategyCase, discount_factor, optimal_control_cara, simpson_integral

SWITCH_TOL = 1e-8
POSITION_TOL = 1e-12


class EquilibriumRegime(enum.Enum):
    ZERO_UNDERWRITING = "ZeroUnderwriting"
    UPPER_BOUND = "UpperBoundDistorted"
    LOWER_BOUND = "LowerBoundDistorted"
    PURE_UNDERWRITING = "PureUnderwriting"
    MARKET_FAILURE = "MarketFailure"

    def __str__(self):
        return self.value


# Regime whose equilibrium price makes the insurer's best response fall in each case.
MATCHING_CASE = {
    EquilibriumRegime.ZERO_UNDERWRITING: StrategyCase.ZERO_UNDERWRITING,
    EquilibriumRegime.UPPER_BOUND: StrategyCase.UPPER_DISTORTION,
    EquilibriumRegime.LOWER_BOUND: StrategyCase.LOWER_DISTORTION,
    EquilibriumRegime.PURE_UNDERWRITING: StrategyCase.ZERO_INVESTMENT,
}

_PRECEDENCE = (
    EquilibriumRegime.ZERO_UNDERWRITING,
    EquilibriumRegime.PURE_UNDERWRITING,
    EquilibriumRegime.LOWER_BOUND,
    EquilibriumRegime.UPPER_BOUND,
    EquilibriumRegime.MARKET_FAILURE,
)


@dataclass(frozen=True)
class Boundaries:
    K: float
    H: float
    Lb: float
    A: float


@dataclass(frozen=True)
class EquilibriumPoint:
    s: float
    regime: EquilibriumRegime
    theta_star: Optional[float]
    x_star: Optional[float]
    y_star: Optional[float]
    xi_star: Optional[float]
    p_rate: Optional[float]
    case: Optional[StrategyCase] = None
    ambiguous: bool = False  # more than one stated condition held; precedence decided
    diagnostics: dict = field(default_factory=dict, compare=False)

    @property
    def failed(self) -> bool:
        return self.regime is EquilibriumRegime.MARKET_FAILURE


@dataclass(frozen=True)
class Switch:
    time: float
    before: EquilibriumRegime
    after: EquilibriumRegime


@dataclass(frozen=True)
class EquilibriumPath:
    points: tuple
    switches: tuple

    @property
    def times(self) -> np.ndarray:
        return np.array([p.s for p in self.points])

    def column(self, name: str) -> np.ndarray:
        return np.array([np.nan if getattr(p, name) is None else getattr(p, name) for p in self.points])

    def regimes(self) -> list:
        return [p.regime for p in self.points]


def boundaries(s: float, params: MarketParams) -> Boundaries:
    e = discount_factor(s, params)
    ratio = params.excess_return / (params.eta * params.sigma)
    a = 0.5 * ratio * e / params.gamma
    return Boundaries(
        K=zero_underwriting_threshold(params),
        H=ratio * (1.0 / params.alpha + e / params.gamma),
        Lb=a - math.sqrt(a * a + 1.0),
        A=a,
    )


def regime_conditions(s: float, params: MarketParams, band: AmbiguityBand, literal: bool = False) -> dict:
    """Truth value of each regime condition.

    With ``literal=True`` the conditions are evaluated exactly as stated in the
    equilibrium characterization. Those statements for the lower-bound and
    pure-underwriting regimes omit ``rho + phi < K``; where that fails the
    insurer's best response at the candidate price is zero underwriting, so the
    default form adds it and the five conditions then partition the space.
    """
    b = boundaries(s, params)
    hi, lo = band.upper, band.lower
    below_k = hi < b.K
    cond = {
        EquilibriumRegime.ZERO_UNDERWRITING: hi >= b.K,
        EquilibriumRegime.UPPER_BOUND: b.Lb <= hi < min(b.K, b.H),
        EquilibriumRegime.LOWER_BOUND: b.H < lo < b.K,
        EquilibriumRegime.PURE_UNDERWRITING: lo <= b.H <= hi,
        EquilibriumRegime.MARKET_FAILURE: hi < min(b.Lb, b.K, b.H),
    }
    if not literal:
        cond[EquilibriumRegime.LOWER_BOUND] = cond[EquilibriumRegime.LOWER_BOUND] and below_k
        cond[EquilibriumRegime.PURE_UNDERWRITING] = cond[EquilibriumRegime.PURE_UNDERWRITING] and below_k
    return cond


def _condition_values(s, params, band) -> dict:
    b = boundaries(s, params)
    return {"rho_plus_phi": band.upper, "rho_minus_phi": band.lower, "K": b.K, "H": b.H, "Lb": b.Lb}


def classify_regime(s: float, params: MarketParams, band: AmbiguityBand) -> EquilibriumRegime:
    """First matching stated condition in the order ZU, PU, LB, UB, failure."""
    if s < params.t0 or s > params.T:
        raise DomainError(f"s={s!r} outside [{params.t0!r}, {params.T!r}]")
    cond = regime_conditions(s, params, band, literal=True)
    for regime in _PRECEDENCE:
        if cond[regime]:
            return regime
    raise ClassificationError("no equilibrium regime condition matched", _condition_values(s, params, band))


def distorted_equilibrium(c: float, s: float, params: MarketParams) -> tuple:
    """Price and positions of a correlation-distorted equilibrium at effective correlation ``c``."""
    e = discount_factor(s, params)
    eta, sigma, mr, l = params.eta, params.sigma, params.excess_return, params.l
    alpha, gamma = params.alpha, params.gamma
    det = 1.0 - c * c
    denom = gamma * det / alpha + e
    theta = (gamma * det * eta**2 + c * (mr / sigma) * eta * e) / (l * denom)
    x = (1.0 - c * mr / (alpha * eta * sigma)) * e / denom
    y = (1.0 / alpha + e / gamma - c * eta * sigma / mr) * (mr / sigma**2) * e / denom
    return theta, x, y


def pure_underwriting_equilibrium(s: float, params: MarketParams) -> tuple:
    e = discount_factor(s, params)
    g = 1.0 / params.alpha + e / params.gamma
    return params.eta**2 / (g * params.l), (e / params.gamma) / g, 0.0


def zero_underwriting_equilibrium(s: float, params: MarketParams) -> tuple:
    e = discount_factor(s, params)
    return price_upper_bound(params), 0.0, params.excess_return / (params.gamma * params.sigma**2) * e


def regime_closed_form(regime: EquilibriumRegime, s: float, params: MarketParams, band: AmbiguityBand) -> tuple:
    """``(theta, x, y)`` from a given regime's formulas, whether or not it holds."""
    if regime is EquilibriumRegime.ZERO_UNDERWRITING:
        return zero_underwriting_equilibrium(s, params)
    if regime is EquilibriumRegime.PURE_UNDERWRITING:
        return pure_underwriting_equilibrium(s, params)
    if regime is EquilibriumRegime.UPPER_BOUND:
        return distorted_equilibrium(band.upper, s, params)
    if regime is EquilibriumRegime.LOWER_BOUND:
        return distorted_equilibrium(band.lower, s, params)
    raise DomainError("market failure has no closed form")


def equilibrium_point(s: float, params: MarketParams, band: AmbiguityBand) -> EquilibriumPoint:
    regime = classify_regime(s, params, band)
    literal = regime_conditions(s, params, band, literal=True)
    ambiguous = sum(literal.values()) > 1
    if regime is EquilibriumRegime.MARKET_FAILURE:
        diagnostics = _condition_values(s, params, band)
        diagnostics["theta_unconstrained"] = distorted_equilibrium(band.upper, s, params)[0]
        return EquilibriumPoint(s, regime, None, None, None, None, None, None, ambiguous, diagnostics)

    theta, x, y = regime_closed_form(regime, s, params, band)
    if regime is EquilibriumRegime.UPPER_BOUND:
        assert theta >= -1e-14, f"negative upper-distorted price {theta!r}"
        theta = max(theta, 0.0)
    control = optimal_control_cara(theta, s, params, band) if theta > 0 else None
    if control is None:
        # theta = 0 only on the Lb boundary; the insurer then holds its pure-investment position.
        xi, p_rate, case = band.phi, params.excess_return**2 / (2.0 * params.sigma**2), None
    else:
        xi, p_rate, case = control.xi_star, control.p_rate, control.case
    return EquilibriumPoint(s, regime, theta, x, y, xi, p_rate, case, ambiguous)


def equilibrium_arrays(times, params: MarketParams, band: AmbiguityBand) -> dict:
    """Vectorized :func:`equilibrium_point` over an array of times.

    Returns arrays ``regime`` (objects), ``theta``, ``x``, ``y``, ``xi`` and
    ``p``; numeric entries are NaN under market failure.
    """
    s = np.asarray(times, dtype=float)
    if np.any((s < params.t0) | (s > params.T)):
        raise DomainError(f"times outside [{params.t0!r}, {params.T!r}]")
    p = params
    return equilibrium_batch(s, p.l, p.eta, p.r, p.mu, p.sigma, p.alpha, p.gamma, p.T, band.rho, band.phi)


def equilibrium_batch(s, l, eta, r, mu, sigma, alpha, gamma, T, rho, phi) -> dict:
    """Equilibrium over broadcastable arrays of times, parameters and bands.

    Inputs are assumed valid (as :class:`MarketParams` and
    :class:`AmbiguityBand` would enforce). Same outputs as
    :func:`equilibrium_arrays`.
    """
    s, l, eta, r, mu, sigma, alpha, gamma, T, rho, phi = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (s, l, eta, r, mu, sigma, alpha, gamma, T, rho, phi))
    )
    mr = mu - r
    e = np.exp(-r * (T - s))
    ratio = mr / (eta * sigma)
    g = 1.0 / alpha + e / gamma
    K = alpha * eta * sigma / mr
    H = ratio * g
    a = 0.5 * ratio * e / gamma
    Lb = a - np.sqrt(a * a + 1.0)
    hi, lo = rho + phi, rho - phi

    zu = hi >= K
    pu = ~zu & (lo <= H) & (H <= hi)
    lb = ~zu & ~pu & (H < lo) & (lo < K)
    ub = ~zu & ~pu & ~lb & (Lb <= hi) & (hi < np.minimum(K, H))
    fail = ~(zu | pu | lb | ub)
    if np.any(fail & ~(hi < np.minimum(np.minimum(Lb, K), H))):
        raise ClassificationError("no equilibrium regime condition matched")

    theta, x, y, xi, p = (np.full(s.shape, np.nan) for _ in range(5))
    regime = np.empty(s.shape, dtype=object)
    regime[fail] = EquilibriumRegime.MARKET_FAILURE
    base_rate = mr**2 / (2.0 * sigma**2)

    regime[zu] = EquilibriumRegime.ZERO_UNDERWRITING
    theta[zu] = (alpha * eta**2 / l)[zu]
    x[zu] = 0.0
    y[zu] = (mr / (gamma * sigma**2) * e)[zu]
    xi[zu] = np.maximum(K - rho, -phi)[zu]
    p[zu] = base_rate[zu]

    regime[pu] = EquilibriumRegime.PURE_UNDERWRITING
    th = (eta**2 / (g * l))[pu]
    theta[pu] = th
    x[pu] = ((e / gamma) / g)[pu]
    y[pu] = 0.0
    psi = th * l[pu] * sigma[pu] / (eta[pu] * mr[pu])
    xi[pu] = 1.0 / psi - rho[pu]
    p[pu] = (th * l[pu]) ** 2 / (2.0 * eta[pu] ** 2)

    for mask, c_all, sign, reg in ((ub, hi, 1.0, EquilibriumRegime.UPPER_BOUND),
                                   (lb, lo, -1.0, EquilibriumRegime.LOWER_BOUND)):
        regime[mask] = reg
        c, em, et, sg, m_r, al, ga, ll = (v[mask] for v in (c_all, e, eta, sigma, mr, alpha, gamma, l))
        det = 1.0 - c * c
        denom = ga * det / al + em
        th = np.maximum((ga * det * et**2 + c * (m_r / sg) * et * em) / (ll * denom), 0.0)
        theta[mask] = th
        x[mask] = (1.0 - c * m_r / (al * et * sg)) * em / denom
        y[mask] = (1.0 / al + em / ga - c * et * sg / m_r) * (m_r / sg**2) * em / denom
        xi[mask] = sign * phi[mask]
        ta, tb = th * ll * sg, m_r * et
        rate = (ta * ta - 2.0 * c * ta * tb + tb * tb) / (2.0 * det * et**2 * sg**2)
        # theta = 0 only on the Lb boundary, where the insurer holds its pure-investment position
        p[mask] = np.where(th > 0, rate, base_rate[mask])
    return {"regime": regime, "theta": theta, "x": x, "y": y, "xi": xi, "p": p}

def _bisect_switch(t_lo: float, t_hi: float, params, band, tol: float = SWITCH_TOL) -> float:
    r_lo = classify_regime(t_lo, params, band)
    while t_hi - t_lo > tol:
        mid = 0.5 * (t_lo + t_hi)
        if classify_regime(mid, params, band) is r_lo:
            t_lo = mid
        else:
            t_hi = mid
    return 0.5 * (t_lo + t_hi)


def _switches(times, regimes, params, band) -> tuple:
    out = []
    for (t0, r0), (t1, r1) in zip(zip(times, regimes), zip(times[1:], regimes[1:])):
        if r0 is not r1:
            out.append(Switch(_bisect_switch(t0, t1, params, band), r0, r1))
    return tuple(out)


def equilibrium_path(grid: TimeGrid, params: MarketParams, band: AmbiguityBand) -> EquilibriumPath:
    """Pointwise equilibrium on ``grid`` with switch times refined by bisection.

    Regime boundaries are monotone in time, so a switch between adjacent grid
    points is located to ``SWITCH_TOL`` years by bisecting the classification.
    """
    grid.check_within(params)
    points = tuple(equilibrium_point(s, params, band) for s in grid)
    switches = _switches(grid.times, [p.regime for p in points], params, band)
    return EquilibriumPath(points, switches)


def switch_times(params: MarketParams, band: AmbiguityBand, start: Optional[float] = None,
                 stop: Optional[float] = None, step: float = 0.5) -> tuple:
    start = params.t0 if start is None else start
    stop = params.T if stop is None else stop
    grid = TimeGrid.uniform(start, stop, step)
    regimes = [classify_regime(s, params, band) for s in grid]
    return _switches(grid.times, regimes, params, band)


def equilibrium_p_integral(t: float, params: MarketParams, band: AmbiguityBand, max_step: float = 0.01) -> float:
    """``int_t^T p_s ds`` along the equilibrium price path."""
    switches = switch_times(params, band, t, params.T)

    def rate(s):
        arrays = equilibrium_arrays(s, params, band)
        bad = np.isnan(arrays["p"])
        if np.any(bad):
            raise DomainError(f"market failure at s={float(s[bad][0]):g}: utility-gain rate undefined")
        return arrays["p"]

    return simpson_integral(rate, t, params.T, [sw.time for sw in switches], max_step)


def regime_from_positions(x: float, y: float, tol: float = POSITION_TOL) -> EquilibriumRegime:
    """Identify the regime from the insurer's underwriting and investment."""
    if y < -tol:
        return EquilibriumRegime.LOWER_BOUND
    if y <= tol:
        return EquilibriumRegime.PURE_UNDERWRITING
    if abs(x) <= tol:
        return EquilibriumRegime.ZERO_UNDERWRITING
    return EquilibriumRegime.UPPER_BOUND


def outcome_family(regime: EquilibriumRegime) -> str:
    if regime is EquilibriumRegime.ZERO_UNDERWRITING:
        return "ZeroUnderwriting"
    if regime is EquilibriumRegime.MARKET_FAILURE:
        return "MarketFailure"
    return "PositiveUnderwriting"


def benchmark_no_ambiguity(s: float, params: MarketParams, rho: float) -> EquilibriumPoint:
    """Equilibrium without ambiguity (``phi = 0``)."""
    band = AmbiguityBand(rho, 0.0)
    point = equilibrium_point(s, params, band)
    if outcome_family(point.regime) == "PositiveUnderwriting":
        upper = distorted_equilibrium(band.upper, s, params)
        lower = distorted_equilibrium(band.lower, s, params)
        assert upper == lower
        if point.regime is EquilibriumRegime.PURE_UNDERWRITING:
            # rho = H(s) exactly: the distorted and pure-underwriting prices coincide
            assert math.isclose(upper[0], point.theta_star, rel_tol=1e-12)
    return point


def necessary_condition_checks(params: MarketParams, band: AmbiguityBand) -> list:
    """Prerequisites for the lower-bound and market-failure regimes."""
    ratio = params.excess_return / (params.eta * params.sigma)
    return [
        ("lower_bound: rho > 0", band.rho > 0),
        ("lower_bound: alpha > (mu - r)/(eta sigma)", params.alpha > ratio),
        ("market_failure: rho < 0", band.rho < 0),
    ]


def possible_regimes(params: MarketParams, band: AmbiguityBand) -> set:
    checks = dict(necessary_condition_checks(params, band))
    regimes = {EquilibriumRegime.ZERO_UNDERWRITING, EquilibriumRegime.UPPER_BOUND, EquilibriumRegime.PURE_UNDERWRITING}
    if checks["lower_bound: rho > 0"] and checks["lower_bound: alpha > (mu - r)/(eta sigma)"]:
        regimes.add(EquilibriumRegime.LOWER_BOUND)
    if checks["market_failure: rho < 0"]:
        regimes.add(EquilibriumRegime.MARKET_FAILURE)
    return regimes


def solve_clearing_price(s: float, params: MarketParams, band: AmbiguityBand, tol: float = 1e-14) -> Optional[float]:
    """Market-clearing price by bisection on excess supply, independent of the regime formulas.

    Returns ``None`` when supply exceeds demand on the whole admissible range. Used
    as a cross-check of the closed forms.
    """
    upper = price_upper_bound(params)

    def excess(theta):
        return optimal_control_cara(theta, s, params, band).x - demand(theta, params)

    lo, hi = upper * 1e-12, upper
    if excess(hi) <= 0:
        return upper
    if excess(lo) > 0:
        return None
    while hi - lo > tol * upper:
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
