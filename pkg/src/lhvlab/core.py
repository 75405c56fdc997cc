"""Detection densities, configuration and curve records shared by every path.

Angles are plain floats in radians throughout the library.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterator, Sequence

import numpy as np

INV_E = math.exp(-1.0)
TWO_PI = 2.0 * math.pi

# densities returning more than this above 1 in magnitude are rejected
_BOUND_SLACK = 1e-12
# cos below this is indistinguishable from zero given an ulp of error in the
# angle; fractional powers would inflate it to ~1e-6 and sign() would split
# the two zeros of cos between +1 and -1
COS_FLOOR = 1e-15


class DegenerateRateError(ArithmeticError):
    """The pair rate t(phi) vanished, so E = c/t cannot be normalized."""


class ZeroCoincidenceError(ArithmeticError):
    """A Monte Carlo batch recorded no coincidences."""


class NoClosedFormError(ValueError):
    """Requested the closed-form path for a density that has none."""


class NotEvenError(ValueError):
    """A density failed the evenness check required by the spectral path."""


class Family(enum.Enum):
    NAIVE = "naive"
    PROJECTION = "proj"
    SIGNED_POWER = "pow"
    CUSTOM = "custom"


class Mode(enum.Enum):
    CORRELATED = "corr"
    ANTICORRELATED = "anticorr"

    @property
    def sigma(self) -> int:
        """Sign applied to side B's spin: -1 when the source flips it."""
        return -1 if self is Mode.ANTICORRELATED else 1


class GridMode(enum.Enum):
    PAPER = "paper"
    FULL = "full"


def signed_pow(a, b: float):
    """Odd extension of ``a ** b`` to negative bases.

    Works on scalars and arrays. ``|a|`` must not exceed 1 and ``b`` must be
    positive.
    """
    if not b > 0:
        raise ValueError(f"exponent must be positive, got {b!r}")
    arr = np.asarray(a, dtype=np.float64)
    if np.any(~(np.abs(arr) <= 1.0)):
        raise ValueError("signed_pow base must lie in [-1, 1]")
    out = np.copysign(np.abs(arr) ** b, arr)
    if out.ndim == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class DetectionDensity:
    """Signed detection probability f(lambda') of one analyzer.

    ``|f|`` is the chance the particle is registered and the sign of ``f`` is
    the spin it is registered with. Built-in families are cosine based; a
    ``CUSTOM`` density is either ``signed_pow(cos, exponent)`` or an arbitrary
    vectorized callable.
    """

    family: Family
    exponent: float | None = None
    func: Callable[[np.ndarray], np.ndarray] | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.family in (Family.SIGNED_POWER, Family.CUSTOM) and self.func is None:
            if self.exponent is None or not self.exponent > 0:
                raise ValueError("signed-power densities need a positive exponent")
        if self.family is not Family.CUSTOM and self.func is not None:
            raise ValueError("only custom densities take a callable")

    @classmethod
    def naive(cls) -> DetectionDensity:
        """Deterministic sign(cos) detector: always registers, |f| = 1."""
        return cls(Family.NAIVE)

    @classmethod
    def projection(cls) -> DetectionDensity:
        return cls(Family.PROJECTION)

    @classmethod
    def signed_power(cls, exponent: float = INV_E) -> DetectionDensity:
        return cls(Family.SIGNED_POWER, exponent=exponent)

    @classmethod
    def custom(cls, exponent: float | None = None,
               func: Callable[[np.ndarray], np.ndarray] | None = None) -> DetectionDensity:
        if (exponent is None) == (func is None):
            raise ValueError("give exactly one of exponent or func")
        return cls(Family.CUSTOM, exponent=exponent, func=func)

    @property
    def kernel_code(self) -> int | None:
        """Family code understood by the compiled kernels, None for callables."""
        if self.func is not None:
            return None
        return {Family.NAIVE: 0, Family.PROJECTION: 1}.get(self.family, 2)

    @property
    def kernel_exponent(self) -> float:
        return float(self.exponent) if self.exponent is not None else 1.0

    @property
    def half_period_symmetric(self) -> bool:
        # f(x + pi) = -f(x) for every cosine-based family, so products of two
        # shifted copies have period pi
        return self.func is None

    @property
    def has_closed_form(self) -> bool:
        return self.family in (Family.NAIVE, Family.PROJECTION)

    @property
    def label(self) -> str:
        if self.family is Family.CUSTOM:
            if self.func is not None:
                return f"custom:{getattr(self.func, '__name__', 'callable')}"
            return f"custom:p={self.exponent:.6g}"
        if self.family is Family.SIGNED_POWER:
            return f"pow:p={self.exponent:.6g}"
        return self.family.value

    def __call__(self, lam):
        x = np.asarray(lam, dtype=np.float64)
        if self.func is not None:
            out = np.asarray(self.func(x), dtype=np.float64)
            if out.shape != x.shape:
                out = np.broadcast_to(out, x.shape).copy()
            if np.any(~(np.abs(out) <= 1.0 + _BOUND_SLACK)):
                raise ValueError("custom density left [-1, 1]")
        else:
            a = np.cos(x)
            if self.family is Family.PROJECTION:
                out = a
            else:
                a = np.where(np.abs(a) < COS_FLOOR, 0.0, a)
                if self.family is Family.NAIVE:
                    out = np.where(a >= 0.0, 1.0, -1.0)
                else:
                    out = np.copysign(np.abs(a) ** self.exponent, a)
        if out.ndim == 0:
            return float(out)
        return out


def eval_density(d: DetectionDensity, lam):
    return d(lam)


def qm_expectation(phi, mode: Mode):
    """Quantum prediction: -cos(phi) for anticorrelated, +cos(phi) for correlated.

    For photons phi is twice the polarizer angle difference.
    """
    return mode.sigma * np.cos(phi) if np.ndim(phi) else mode.sigma * math.cos(phi)


def fold_angle(phi):
    """Map an angle onto [0, pi] using evenness and 2 pi periodicity."""
    x = np.mod(phi, TWO_PI)
    x = np.where(x > math.pi, TWO_PI - x, x)
    return float(x) if np.ndim(x) == 0 else x


def phi_grid(points: int, grid_mode: GridMode = GridMode.FULL) -> np.ndarray:
    """Sweep angles on [0, pi].

    ``FULL`` includes both endpoints. ``PAPER`` reuses the half-open grid
    k*pi/points, k < points, that the half-interval quadrature samples
    theta on.
    """
    if points < 2:
        raise ValueError("need at least two phi points")
    if grid_mode is GridMode.PAPER:
        return np.arange(points) * (math.pi / points)
    return np.linspace(0.0, math.pi, points)


@dataclass(frozen=True)
class TheoryConfig:
    density: DetectionDensity
    correlation_mode: Mode = Mode.ANTICORRELATED
    theta_points: int = 50
    phi_points: int = 50
    grid_mode: GridMode = GridMode.FULL
    seed: int = 42
    pairs_per_angle: int = 1_000_000

    def __post_init__(self):
        if self.theta_points < 2:
            raise ValueError("theta_points must be >= 2")
        if self.phi_points < 2:
            raise ValueError("phi_points must be >= 2")
        if self.pairs_per_angle < 1:
            raise ValueError("pairs_per_angle must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 unsigned bits")

    def to_dict(self) -> dict:
        return {
            "density": self.density.label,
            "family": self.density.family.value,
            "exponent": self.density.exponent,
            "mode": self.correlation_mode.value,
            "theta_points": self.theta_points,
            "phi_points": self.phi_points,
            "grid": self.grid_mode.value,
            "seed": self.seed,
            "pairs_per_angle": self.pairs_per_angle,
        }


@dataclass(frozen=True)
class CurvePoint:
    phi: float
    c: float  # raw correlation integral, no mode sign
    t: float
    e_hv: float
    e_ref: float
    se_e: float | None = None
    se_t: float | None = None


@dataclass(frozen=True)
class Curve:
    """Ordered run of :class:`CurvePoint` plus the path that produced it."""

    points: tuple[CurvePoint, ...]
    method: str = ""

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self) -> Iterator[CurvePoint]:
        return iter(self.points)

    def __getitem__(self, i):
        return self.points[i]

    def _col(self, name: str) -> np.ndarray:
        return np.array([getattr(p, name) for p in self.points], dtype=np.float64)

    @property
    def phi(self) -> np.ndarray:
        return self._col("phi")

    @property
    def c(self) -> np.ndarray:
        return self._col("c")

    @property
    def t(self) -> np.ndarray:
        return self._col("t")

    @property
    def e_hv(self) -> np.ndarray:
        return self._col("e_hv")

    @property
    def e_ref(self) -> np.ndarray:
        return self._col("e_ref")

    @property
    def se_e(self) -> np.ndarray:
        return np.array([np.nan if p.se_e is None else p.se_e for p in self.points])

    @property
    def se_t(self) -> np.ndarray:
        return np.array([np.nan if p.se_t is None else p.se_t for p in self.points])


def build_curve(phi: Sequence[float], c: Sequence[float], t: Sequence[float],
                mode: Mode, method: str, *, rate_floor: float = 1e-13) -> Curve:
    """Normalize raw (c, t) samples into a curve, refusing vanishing rates."""
    phi = np.asarray(phi, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    bad = np.flatnonzero(~(t > rate_floor))
    if bad.size:
        raise DegenerateRateError(f"pair rate vanishes at phi={phi[bad[0]]:.6g}")
    e = mode.sigma * c / t
    ref = qm_expectation(phi, mode)
    return Curve(
        tuple(CurvePoint(float(p), float(ci), float(ti), float(ei), float(ri))
              for p, ci, ti, ei, ri in zip(phi, c, t, e, ref)),
        method,
    )
