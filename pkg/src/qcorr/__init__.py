"""Relative-entropy quantifiers of correlations in two-qubit states."""
from .closed_form import MeasureReport, measure_report
from .divergences import relative_entropy
from .optimize import OptimizerConfig
from .states import BellDiagonalState, DensityMatrix, PureSchmidtState

__version__ = "0.1.0"

__all__ = [
    "BellDiagonalState",
    "DensityMatrix",
    "MeasureReport",
    "OptimizerConfig",
    "PureSchmidtState",
    "measure_report",
    "relative_entropy",
]
