"""Robust insurance-market equilibrium under correlation ambiguity."""

__version__ = "0.1.0"

from .calibration import CalibratedBand, CalibrationInput, ambiguity_radius, fisher_z, inverse_fisher, normal_quantile
from .equilibrium import (
    EquilibriumPath,
    EquilibriumPoint,
    EquilibriumRegime,
    classify_regime,
    equilibrium_path,
    equilibrium_point,
    switch_times,
)
from .errors import (
    AdmissibilityError,
    ClassificationError,
    ConfigError,
    DegenerateProfitabilityError,
    DomainError,
    ModelError,
    OracleCoverageError,
    PreconditionError,
)
from .market import AmbiguityBand, MarketParams, TimeGrid, demand, price_bounds, profitability_psi
from .saddle import GridSpec, SaddleResult, grid_maxmin
from .strategy import OptimalControl, StrategyCase, classify_strategy_case, optimal_control_cara

__all__ = [
    "AdmissibilityError", "AmbiguityBand", "CalibratedBand", "CalibrationInput", "ClassificationError",
    "ConfigError", "DegenerateProfitabilityError", "DomainError", "EquilibriumPath", "EquilibriumPoint",
    "EquilibriumRegime", "GridSpec", "MarketParams", "ModelError", "OptimalControl", "OracleCoverageError",
    "PreconditionError", "SaddleResult", "StrategyCase", "TimeGrid", "ambiguity_radius", "classify_regime",
    "classify_strategy_case", "demand", "equilibrium_path", "equilibrium_point", "fisher_z", "grid_maxmin",
    "inverse_fisher", "normal_quantile", "optimal_control_cara", "price_bounds", "profitability_psi",
    "switch_times",
]
