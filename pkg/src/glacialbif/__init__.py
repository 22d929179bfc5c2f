"""Bifurcation analysis of the reduced Saltzman-Maasch glacial-cycle model."""

__version__ = "0.1.0"

from .errors import AnalysisError, ParameterError
from .model import ReducedParams, RescaledParams, SlowFastParams

__all__ = ["AnalysisError", "ParameterError", "ReducedParams", "RescaledParams", "SlowFastParams", "__version__"]
