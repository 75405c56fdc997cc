"""Rectangular-rule evaluation of the correlation and pair-rate integrals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .closed_form import closed_curve
from .core import (
    TWO_PI,
    Curve,
    CurvePoint,
    DegenerateRateError,
    DetectionDensity,
    GridMode,
    Mode,
    TheoryConfig,
    build_curve,
    phi_grid,
    qm_expectation,
)

# cap on the phi x theta product matrix held at once
_MAX_BLOCK = 2_000_000


@dataclass(frozen=True)
class QuadratureGrid:
    """Left-endpoint nodes on a half-open interval.

    ``PAPER`` samples [0, pi) and doubles the sum, ``FULL`` samples [0, 2 pi).
    """

    mode: GridMode
    theta_points: int
    nodes: np.ndarray
    weight: float

    @classmethod
    def make(cls, theta_points: int, mode: GridMode = GridMode.FULL) -> QuadratureGrid:
        if theta_points < 2:
            raise ValueError("theta_points must be >= 2")
        span = math.pi if mode is GridMode.PAPER else TWO_PI
        nodes = np.arange(theta_points) * (span / theta_points)
        nodes.setflags(write=False)
        return cls(mode, theta_points, nodes, span / theta_points)

    @property
    def scale(self) -> float:
        return 2.0 * self.weight if self.mode is GridMode.PAPER else self.weight


def _check_grid(d: DetectionDensity, g: QuadratureGrid) -> None:
    if g.mode is GridMode.PAPER and not d.half_period_symmetric:
        raise ValueError("half-interval grid needs a cosine-based density; use the full grid")


def integrals(d: DetectionDensity, phi, g: QuadratureGrid) -> tuple[np.ndarray, np.ndarray]:
    """(c, t) at every angle in ``phi`` on grid ``g``."""
    _check_grid(d, g)
    phi = np.atleast_1d(np.asarray(phi, dtype=np.float64))
    f_theta = d(g.nodes)
    c = np.empty(phi.shape)
    t = np.empty(phi.shape)
    rows = max(1, _MAX_BLOCK // g.theta_points)
    for start in range(0, phi.size, rows):
        block = phi[start:start + rows]
        prod = f_theta[None, :] * d(g.nodes[None, :] - block[:, None])
        c[start:start + rows] = prod.sum(axis=1) * g.scale
        t[start:start + rows] = np.abs(prod).sum(axis=1) * g.scale
    return c, t


def quad_c(d: DetectionDensity, phi, g: QuadratureGrid):
    c, _ = integrals(d, phi, g)
    return float(c[0]) if np.ndim(phi) == 0 else c


def quad_t(d: DetectionDensity, phi, g: QuadratureGrid):
    _, t = integrals(d, phi, g)
    return float(t[0]) if np.ndim(phi) == 0 else t


def quad_expectation(d: DetectionDensity, phi: float, mode: Mode,
                     g: QuadratureGrid, *, rate_floor: float = 1e-13) -> CurvePoint:
    c, t = integrals(d, phi, g)
    c, t = float(c[0]), float(t[0])
    if not t > rate_floor:
        raise DegenerateRateError(f"pair rate vanishes at phi={phi:.6g}")
    return CurvePoint(float(phi), c, t, mode.sigma * c / t, float(qm_expectation(float(phi), mode)))


def quad_curve(d: DetectionDensity, phi, mode: Mode, g: QuadratureGrid) -> Curve:
    c, t = integrals(d, phi, g)
    return build_curve(phi, c, t, mode, "quad")


def sweep_curve(cfg: TheoryConfig, *, closed: bool = False) -> Curve:
    """Curve over ``cfg.phi_points`` angles in [0, pi].

    With ``closed=True`` the analytic forms are used (densities that have
    them only); otherwise the rectangular rule on ``cfg``'s theta grid.
    """
    phi = phi_grid(cfg.phi_points, cfg.grid_mode)
    if closed:
        return closed_curve(cfg.density, phi, cfg.correlation_mode)
    g = QuadratureGrid.make(cfg.theta_points, cfg.grid_mode)
    return quad_curve(cfg.density, phi, cfg.correlation_mode, g)
