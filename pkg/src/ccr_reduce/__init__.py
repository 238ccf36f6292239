"""Constraint reduction for CCR algebras, with a discretized Gupta-Bleuler model."""
from .errors import (
    CCRError,
    FirstClassViolation,
    InvalidArgument,
    NoWitnessFound,
    PreconditionViolation,
    StageAdmissibility,
    UnsupportedAction,
    UnsupportedScenario,
)

__version__ = "0.1.0"

__all__ = [
    "CCRError",
    "FirstClassViolation",
    "InvalidArgument",
    "NoWitnessFound",
    "PreconditionViolation",
    "StageAdmissibility",
    "UnsupportedAction",
    "UnsupportedScenario",
    "__version__",
]
