"""Analytic reference curves on 0 <= phi <= pi.

Outside that interval callers fold the angle with :func:`lhvlab.core.fold_angle`
instead of extending the formulas.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import Curve, DetectionDensity, Family, Mode, NoClosedFormError, build_curve


def _check_range(phi) -> np.ndarray:
    arr = np.asarray(phi, dtype=np.float64)
    if np.any(~((arr >= 0.0) & (arr <= math.pi))):
        raise ValueError("closed forms are defined for 0 <= phi <= pi")
    return arr


def _out(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def naive_expectation(phi):
    """Straight-line correlation (2/pi) phi - 1 of the sign(cos) toy model."""
    return _out((2.0 / math.pi) * _check_range(phi) - 1.0)


class SignTriple(NamedTuple):
    a: int
    b: int
    ab: int


def _sign(x: float) -> int:
    return 1 if x >= 0.0 else -1


def naive_sign_table(theta: float, phi: float) -> SignTriple:
    """Outcomes of the toy model for hidden angle ``theta``; sign(0) is +1."""
    a = _sign(math.cos(theta))
    b = _sign(-math.cos(theta - phi))
    return SignTriple(a, b, a * b)


@dataclass(frozen=True)
class TheoryICurves:
    c_minus: float
    c_plus: float
    t1: float
    c1: float  # anticorrelated sign already applied
    e_hv1: float


def theory1_curves(phi) -> TheoryICurves:
    """Closed forms of the cos(lambda') detector with an anticorrelated source.

    Accepts a scalar or an array; fields follow the input shape.
    """
    p = _check_range(phi)
    s, c = np.sin(p), np.cos(p)
    c_minus = 0.5 * (s - p * c)
    c_plus = 0.5 * (s + (math.pi - p) * c)
    t1 = 2.0 * s + (math.pi - 2.0 * p) * c
    c1 = -math.pi * c
    return TheoryICurves(_out(c_minus), _out(c_plus), _out(t1), _out(c1), _out(c1 / t1))


def theory1_unnormalized_expectation(phi):
    """c1(phi) divided by the aligned rate t_max = pi, i.e. -cos(phi)."""
    return _out(-math.pi * np.cos(np.asarray(phi, dtype=np.float64)) / math.pi)


def closed_curve(density: DetectionDensity, phi, mode: Mode) -> Curve:
    """Exact (c, t, E) at the given angles for densities with a closed form.

    ``c`` is the raw correlation integral; the mode sign enters only E.
    """
    p = _check_range(np.atleast_1d(phi))
    if density.family is Family.NAIVE:
        c = 2.0 * math.pi - 4.0 * p
        t = np.full_like(p, 2.0 * math.pi)
    elif density.family is Family.PROJECTION:
        c = math.pi * np.cos(p)
        t = theory1_curves(p).t1
    else:
        raise NoClosedFormError(f"no closed form for density {density.label}")
    return build_curve(p, c, t, mode, "closed")
