"""Probabilistic-detection local hidden variable models of the EPRB experiment."""

from .core import (
    INV_E,
    Curve,
    CurvePoint,
    DegenerateRateError,
    DetectionDensity,
    Family,
    GridMode,
    Mode,
    NoClosedFormError,
    NotEvenError,
    TheoryConfig,
    ZeroCoincidenceError,
    eval_density,
    qm_expectation,
    signed_pow,
)
from .kernels import BACKEND

__version__ = "0.1.0"
