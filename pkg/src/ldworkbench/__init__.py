"""Entropy, large deviations, hypothesis testing and Fisher geometry on finite spaces."""
from .errors import (
    EnumerationCapExceeded,
    FaithfulnessError,
    InvalidInput,
    NonConvergence,
    WorkbenchError,
)
from .measures import OutcomeSpace, ProbMeasure, RandomVar, StochasticMap

__all__ = [
    "EnumerationCapExceeded",
    "FaithfulnessError",
    "InvalidInput",
    "NonConvergence",
    "OutcomeSpace",
    "ProbMeasure",
    "RandomVar",
    "StochasticMap",
    "WorkbenchError",
]

__version__ = "0.1.0"
