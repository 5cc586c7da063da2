"""Value of exploring a challenger for what it reveals about the status quo."""

from .core import (
    CaraParams,
    ModelParams,
    OptionValueBreakdown,
    benchmark_gain,
    catalytic_closed_form,
    catalytic_value,
    decompose_option_value,
    switching_value,
    total_option_value,
)
from .errors import (
    AlwaysExploreEnvironment,
    CatalyticError,
    DomainError,
    InfeasibleMoments,
    NumericalError,
    ParameterError,
    QuadratureError,
    ThresholdNotFound,
)

__all__ = [
    "AlwaysExploreEnvironment",
    "CaraParams",
    "CatalyticError",
    "DomainError",
    "InfeasibleMoments",
    "ModelParams",
    "NumericalError",
    "OptionValueBreakdown",
    "ParameterError",
    "QuadratureError",
    "ThresholdNotFound",
    "benchmark_gain",
    "catalytic_closed_form",
    "catalytic_value",
    "decompose_option_value",
    "switching_value",
    "total_option_value",
]
