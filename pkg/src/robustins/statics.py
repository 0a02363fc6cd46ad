"""Comparative-statics sign predicates and their finite-difference checks.

Derivatives with respect to ``rho + phi`` (upper-distorted regime) and
``rho - phi`` (lower-distorted regime) are taken by moving ``rho``, which
shifts both effective correlations one for one. The Sharpe ratio is moved by
varying ``mu`` with ``sigma`` fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .equilibrium import EquilibriumRegime, boundaries, classify_regime, equilibrium_point
from .errors import PreconditionError
from .market import AmbiguityBand, MarketParams, zero_underwriting_threshold

FD_STEP = 1e-6
ZERO_TOL = 1e-8
QUANTITIES = ("theta", "x", "y")


@dataclass(frozen=True)
class SensitivityReport:
    quantity: str
    driver: str
    analytic_sign: int
    fd_value: float
    threshold: Optional[float] = None

    @property
    def consistent(self) -> bool:
        if self.analytic_sign == 0:
            return abs(self.fd_value) <= ZERO_TOL
        return abs(self.fd_value) > ZERO_TOL and math.copysign(1, self.fd_value) == self.analytic_sign


def _sign(v: float) -> int:
    v = float(v)
    return (v > 0) - (v < 0)


def _positions(s, params, band):
    pt = equilibrium_point(s, params, band)
    return pt.regime, (pt.theta_star, pt.x_star, pt.y_star)


def finite_difference(s: float, params: MarketParams, band: AmbiguityBand, wrt: str, step: float = FD_STEP) -> tuple:
    """Central differences of ``(theta*, x*, y*)`` in ``rho``, ``phi`` or ``mu``.

    Raises :class:`PreconditionError` if the regime changes within the stencil.
    """
    if wrt == "rho":
        lo, hi = (params, AmbiguityBand(band.rho - step, band.phi)), (params, AmbiguityBand(band.rho + step, band.phi))
    elif wrt == "phi":
        lo, hi = (params, AmbiguityBand(band.rho, band.phi - step)), (params, AmbiguityBand(band.rho, band.phi + step))
    elif wrt == "mu":
        lo, hi = (params.replace(mu=params.mu - step), band), (params.replace(mu=params.mu + step), band)
    else:
        raise ValueError(f"unknown driver {wrt!r}")
    base = classify_regime(s, params, band)
    r_lo, v_lo = _positions(s, *lo)
    r_hi, v_hi = _positions(s, *hi)
    if not (r_lo is base is r_hi):
        raise PreconditionError(f"regime changes within the {wrt} stencil at s={s!r}")
    return tuple((b - a) / (2.0 * step) for a, b in zip(v_lo, v_hi))


def _require(s, params, band, *regimes):
    regime = classify_regime(s, params, band)
    if regime not in regimes:
        names = ", ".join(r.value for r in regimes)
        raise PreconditionError(f"regime is {regime.value}, expected {names}")
    return regime


def upper_thresholds(s: float, params: MarketParams, band: AmbiguityBand) -> tuple:
    """Thresholds on ``rho + phi`` for ``(theta*, x*)`` and, as displayed, for ``y*``."""
    c = band.upper
    b = boundaries(s, params)
    g = 1.0 / params.alpha + math.exp(-params.r * (params.T - s)) / params.gamma
    inv_k = 1.0 / zero_underwriting_threshold(params)
    tx = (b.H - c) / (1.0 - inv_k * c)
    ty = g * (1.0 - inv_k * c) / (b.H - c)
    return tx, ty


def exact_y_sign(s: float, params: MarketParams, band: AmbiguityBand) -> int:
    """Sign of ``dy*/d(rho + phi)`` from direct differentiation of the closed form.

    With ``G = 1/alpha + e^{-r(T-s)}/gamma`` and ``k = eta sigma / (mu - r)``
    the derivative has the sign of ``2 c G - c^2 k - alpha k G``.
    """
    c = band.upper
    g = 1.0 / params.alpha + math.exp(-params.r * (params.T - s)) / params.gamma
    k = params.eta * params.sigma / params.excess_return
    return _sign(2.0 * c * g - c * c * k - params.alpha * k * g)


def upper_regime_signs(
    s: float, params: MarketParams, band: AmbiguityBand, y_rule: str = "display", step: float = FD_STEP
) -> tuple:
    """Signs of ``(theta*, x*, y*)`` with respect to ``rho + phi``.

    ``y_rule="display"`` compares ``rho + phi`` with the reciprocal-form
    threshold; ``"exact"`` uses :func:`exact_y_sign`.
    """
    if y_rule not in ("display", "exact"):
        raise ValueError(f"unknown y_rule {y_rule!r}")
    _require(s, params, band, EquilibriumRegime.UPPER_BOUND)
    c = band.upper
    fd = finite_difference(s, params, band, "rho", step)
    if c <= 0:
        signs, thresholds = (1, -1, -1), (None, None, None)
    else:
        tx, ty = upper_thresholds(s, params, band)
        st = _sign(tx - c)
        sy = -_sign(ty - c) if y_rule == "display" else exact_y_sign(s, params, band)
        signs, thresholds = (st, -st, sy), (tx, tx, ty)
    return tuple(
        SensitivityReport(q, "rho_plus_phi", sg, v, th) for q, sg, v, th in zip(QUANTITIES, signs, fd, thresholds)
    )


def lower_regime_signs(s: float, params: MarketParams, band: AmbiguityBand, step: float = FD_STEP) -> tuple:
    """Signs ``(-, +, -)`` of ``(theta*, x*, y*)`` with respect to ``rho - phi``."""
    _require(s, params, band, EquilibriumRegime.LOWER_BOUND)
    fd = finite_difference(s, params, band, "rho", step)
    return tuple(SensitivityReport(q, "rho_minus_phi", sg, v) for q, sg, v in zip(QUANTITIES, (-1, 1, -1), fd))


def sharpe_signs(s: float, params: MarketParams, band: AmbiguityBand, step: float = FD_STEP) -> tuple:
    regime = _require(
        s,
        params,
        band,
        EquilibriumRegime.ZERO_UNDERWRITING,
        EquilibriumRegime.UPPER_BOUND,
        EquilibriumRegime.LOWER_BOUND,
        EquilibriumRegime.PURE_UNDERWRITING,
    )
    if regime is EquilibriumRegime.ZERO_UNDERWRITING:
        signs = (0, 0, 1)
    elif regime is EquilibriumRegime.UPPER_BOUND:
        sc = _sign(band.upper)
        signs = (sc, -sc, 1)
    elif regime is EquilibriumRegime.LOWER_BOUND:
        signs = (1, -1, 1)
    else:
        signs = (0, 0, 0)
    # d(Sharpe) = d(mu) / sigma
    fd = tuple(v * params.sigma for v in finite_difference(s, params, band, "mu", step))
    return tuple(SensitivityReport(q, "sharpe", sg, v) for q, sg, v in zip(QUANTITIES, signs, fd))


def ambiguity_invariance(s: float, params: MarketParams, band: AmbiguityBand, step: float = FD_STEP) -> dict:
    """FD of ``(theta*, x*, y*)`` in ``rho`` and ``phi`` for the two ambiguity-free regimes."""
    _require(s, params, band, EquilibriumRegime.ZERO_UNDERWRITING, EquilibriumRegime.PURE_UNDERWRITING)
    out = {"rho": finite_difference(s, params, band, "rho", step)}
    if band.phi >= step:
        out["phi"] = finite_difference(s, params, band, "phi", step)
    return out


def statics_report(s: float, params: MarketParams, band: AmbiguityBand, y_rule: str = "display") -> list:
    """All reports that apply at ``s``; empty under market failure."""
    regime = classify_regime(s, params, band)
    reports = []
    if regime is EquilibriumRegime.MARKET_FAILURE:
        return reports
    if regime is EquilibriumRegime.UPPER_BOUND:
        reports += upper_regime_signs(s, params, band, y_rule)
    elif regime is EquilibriumRegime.LOWER_BOUND:
        reports += lower_regime_signs(s, params, band)
    else:
        for q, v in zip(QUANTITIES, finite_difference(s, params, band, "rho")):
            reports.append(SensitivityReport(q, "rho_plus_phi", 0, v))
    reports += sharpe_signs(s, params, band)
    return reports
