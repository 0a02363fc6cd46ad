"""Robust underwriting/investment controls for a CARA insurer.

Given a loading factor the insurer solves a max-min problem over its
underwriting amount ``x >= 0``, risky investment ``y`` and the adversarial
correlation distortion ``xi`` in ``[-phi, phi]``. The solution falls into one
of four cases determined by ``(rho, phi, psi)``, where ``psi`` is the
profitability ratio of underwriting relative to investment.

All controls here depend on the value function only through the ratio
``-V_m / V_mm``; for CARA utility that ratio is ``exp(-r (T - s)) / gamma``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Optional

import numpy as np
from scipy.integrate import simpson

from .errors import ClassificationError, DegenerateProfitabilityError, DomainError
from .market import AmbiguityBand, MarketParams, profitability_psi

BOUNDARY_TOL = 1e-12


class StrategyCase(enum.Enum):
    ZERO_UNDERWRITING = "ZeroUnderwriting"
    UPPER_DISTORTION = "UpperDistortion"
    LOWER_DISTORTION = "LowerDistortion"
    ZERO_INVESTMENT = "ZeroInvestment"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class OptimalControl:
    """Optimal ``(x, y)`` with the worst-case distortion and utility-gain rate.

    ``xi_interval`` holds the full set of worst-case distortions; it is a
    proper interval only in the zero-underwriting case, where ``xi_star`` is its
    lower end. ``xi_truncated`` flags that the unconstrained interval had to be
    intersected with ``[-phi, phi]``.
    """

    x: float
    y: float
    xi_star: float
    case: StrategyCase
    p_rate: float
    xi_interval: tuple = (0.0, 0.0)
    xi_truncated: bool = False
    near_boundary: bool = False


@dataclass(frozen=True)
class ValueFunctionParams:
    t: float
    m: float
    p_integral: float


def strategy_case_conditions(rho: float, phi: float, psi: float) -> dict:
    """Evaluate each case condition independently, exactly as stated.

    Used for partition checks; :func:`classify_strategy_case` is the routine
    for actual classification.
    """
    inv = 1.0 / psi if psi > 0 else math.inf
    return {
        StrategyCase.ZERO_UNDERWRITING: phi >= psi - rho,
        StrategyCase.UPPER_DISTORTION: phi < psi - rho and phi < inv - rho,
        StrategyCase.LOWER_DISTORTION: rho - psi < phi < rho - inv,
        StrategyCase.ZERO_INVESTMENT: phi >= inv - rho and phi >= rho - inv,
    }


def near_case_boundary(rho: float, phi: float, psi: float, tol: float = BOUNDARY_TOL) -> bool:
    gaps = [phi - (psi - rho), phi - (rho - psi)]
    if psi > 0:
        gaps += [phi - (1.0 / psi - rho), phi - (rho - 1.0 / psi)]
    return min(abs(g) for g in gaps) <= tol


def classify_strategy_case(rho: float, phi: float, psi: float) -> StrategyCase:
    if psi < 0:
        raise DomainError(f"psi must be non-negative, got {psi!r}")
    if phi >= psi - rho:
        return StrategyCase.ZERO_UNDERWRITING
    if psi == 0:
        raise DegenerateProfitabilityError("psi = 0 outside the zero-underwriting case; 1/psi is undefined")
    inv = 1.0 / psi
    if phi < inv - rho:
        return StrategyCase.UPPER_DISTORTION
    if rho - psi < phi < rho - inv:
        return StrategyCase.LOWER_DISTORTION
    if phi >= inv - rho and phi >= rho - inv:
        return StrategyCase.ZERO_INVESTMENT
    raise ClassificationError(
        "no strategy case matched",
        {"rho": rho, "phi": phi, "psi": psi},
    )


def discount_factor(s: float, params: MarketParams) -> float:
    """``exp(-r (T - s))``."""
    if s > params.T:
        raise DomainError(f"s={s!r} exceeds the horizon T={params.T!r}")
    return math.exp(-params.r * (params.T - s))


def cara_vm_ratio(s: float, params: MarketParams) -> float:
    """``-V_m / V_mm`` for the CARA value function."""
    return discount_factor(s, params) / params.gamma


def distorted_rate(theta: float, c: float, params: MarketParams) -> float:
    """Utility-gain rate when both controls are active at effective correlation ``c``."""
    a = theta * params.l * params.sigma
    b = params.excess_return * params.eta
    return (a * a - 2.0 * c * a * b + b * b) / (2.0 * (1.0 - c * c) * params.eta**2 * params.sigma**2)


def controls_given_ratio(
    theta: float, params: MarketParams, band: AmbiguityBand, vm_ratio: float
) -> OptimalControl:
    """Saddle-point controls for an arbitrary ``-V_m / V_mm`` ratio."""
    if not theta > 0:
        raise DomainError(f"theta must be positive, got {theta!r}")
    if not vm_ratio > 0:
        raise DomainError(f"-V_m/V_mm must be positive, got {vm_ratio!r}")
    rho, phi = band.rho, band.phi
    l, eta, sigma, mr = params.l, params.eta, params.sigma, params.excess_return
    psi = profitability_psi(theta, params)
    case = classify_strategy_case(rho, phi, psi)
    near = near_case_boundary(rho, phi, psi)

    if case is StrategyCase.ZERO_UNDERWRITING:
        lo = psi - rho
        truncated = lo < -phi
        lo = max(lo, -phi)
        return OptimalControl(
            x=0.0,
            y=vm_ratio * mr / sigma**2,
            xi_star=lo,
            case=case,
            p_rate=mr**2 / (2.0 * sigma**2),
            xi_interval=(lo, phi),
            xi_truncated=truncated,
            near_boundary=near,
        )
    if case is StrategyCase.ZERO_INVESTMENT:
        xi = 1.0 / psi - rho
        return OptimalControl(
            x=vm_ratio * theta * l / eta**2,
            y=0.0,
            xi_star=xi,
            case=case,
            p_rate=(theta * l) ** 2 / (2.0 * eta**2),
            xi_interval=(xi, xi),
            near_boundary=near,
        )

    xi = phi if case is StrategyCase.UPPER_DISTORTION else -phi
    c = rho + xi
    det = 1.0 - c * c
    x = vm_ratio * (theta * l * sigma - c * mr * eta) / (det * eta**2 * sigma)
    y = vm_ratio * (mr * eta - c * theta * l * sigma) / (det * eta * sigma**2)
    return OptimalControl(
        x=x,
        y=y,
        xi_star=xi,
        case=case,
        p_rate=distorted_rate(theta, c, params),
        xi_interval=(xi, xi),
        near_boundary=near,
    )


def optimal_control_cara(theta: float, s: float, params: MarketParams, band: AmbiguityBand) -> OptimalControl:
    if s < params.t0 or s > params.T:
        raise DomainError(f"s={s!r} outside [{params.t0!r}, {params.T!r}]")
    return controls_given_ratio(theta, params, band, cara_vm_ratio(s, params))


def utility_gain_rate(theta: float, s: float, params: MarketParams, band: AmbiguityBand) -> float:
    return optimal_control_cara(theta, s, params, band).p_rate


def value_function(vp: ValueFunctionParams, params: MarketParams) -> float:
    """CARA value ``-(1/gamma) exp(-gamma m e^{r(T-t)} - int_t^T p_s ds)``."""
    growth = math.exp(params.r * (params.T - vp.t))
    return -math.exp(-params.gamma * vp.m * growth - vp.p_integral) / params.gamma


def kkt_multipliers(control: OptimalControl, theta: float, s: float, params: MarketParams, band: AmbiguityBand):
    """Implied Kuhn-Tucker multipliers ``(lambda_x, lambda_xi)`` at the optimum.

    Uses the CARA derivatives scaled so that ``V_m = 1``; both multipliers must
    be non-negative. The multiplier of an inactive constraint is reported as 0.
    """
    vmm = -1.0 / cara_vm_ratio(s, params)
    eta, sigma, mr = params.eta, params.sigma, params.excess_return
    lam_x = 0.0
    lam_xi = 0.0
    if control.case is StrategyCase.ZERO_UNDERWRITING:
        lam_x = (band.rho + control.xi_star) * mr * eta / sigma - theta * params.l
    elif band.phi > 0 and control.case is StrategyCase.UPPER_DISTORTION:
        lam_xi = -vmm * control.x * eta * control.y * sigma / band.phi
    elif band.phi > 0 and control.case is StrategyCase.LOWER_DISTORTION:
        lam_xi = vmm * control.x * eta * control.y * sigma / band.phi
    return lam_x, lam_xi


def hjbi_residual(
    theta: float,
    t: float,
    m: float,
    params: MarketParams,
    band: AmbiguityBand,
    p_integral: float = 0.0,
    control: Optional[OptimalControl] = None,
) -> tuple:
    """Residual of the HJBI equation at ``(t, m)`` with the analytic derivatives.

    Returns ``(residual, scale)``; ``scale`` is the largest magnitude among the
    summed terms so ``residual / scale`` is a relative error.
    """
    if control is None:
        control = optimal_control_cara(theta, t, params, band)
    vp = ValueFunctionParams(t, m, p_integral)
    v = value_function(vp, params)
    growth = math.exp(params.r * (params.T - t))
    g = params.gamma
    v_t = v * (g * m * params.r * growth + control.p_rate)
    v_m = -g * growth * v
    v_mm = g * g * growth * growth * v
    x, y = control.x, control.y
    c = band.rho + control.xi_star
    drift = x * theta * params.l + y * params.excess_return + m * params.r
    quad = x * x * params.eta**2 + 2.0 * c * x * params.eta * y * params.sigma + y * y * params.sigma**2
    terms = (v_t, v_m * drift, 0.5 * v_mm * quad)
    return sum(terms), max(abs(term) for term in terms)


def simpson_integral(
    rate: Callable[[np.ndarray], np.ndarray],
    start: float,
    stop: float,
    breakpoints: Iterable[float] = (),
    max_step: float = 0.01,
) -> float:
    """Composite Simpson integral of a piecewise-smooth rate.

    The interval is split at ``breakpoints`` and each piece uses an even
    number of panels no wider than ``max_step``.
    """
    if stop < start:
        raise DomainError("integration bounds reversed")
    if stop == start:
        return 0.0
    edges = [start] + sorted(b for b in breakpoints if start < b < stop) + [stop]
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        n = max(2, int(math.ceil((b - a) / max_step)))
        n += n % 2
        s = np.linspace(a, b, n + 1)
        total += float(simpson(rate(s), x=s))
    return total
