"""Deviation statistics, Bell-inequality evaluation and the exponent tradeoff."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterable

import numpy as np

from .core import Curve, DetectionDensity, TheoryConfig, fold_angle
from .quadrature import sweep_curve

# lhs - rhs within this is a tie (e.g. any affine E hits equality exactly)
VIOLATION_TOL = 1e-12


@dataclass(frozen=True)
class DeviationReport:
    """How far a curve strays from a flat pair rate and from the QM correlation.

    ``mean_t`` is the reference rate the t deviations are measured against:
    the midpoint of the largest and smallest sampled rate, so the extreme
    deviations are symmetric about it. Rate deviations are relative to it;
    correlation deviations are absolute differences E - E_ref. Standard
    deviations divide by the number of samples.
    """

    mean_t: float
    max_rel_dev_t: float
    std_rel_dev_t: float
    max_abs_dev_e: float
    std_abs_dev_e: float
    sample_points: int

    def to_dict(self) -> dict:
        return {
            "mean_t": self.mean_t,
            "half_mean_t": self.mean_t / 2.0,
            "max_rel_dev_t": self.max_rel_dev_t,
            "std_rel_dev_t": self.std_rel_dev_t,
            "max_abs_dev_e": self.max_abs_dev_e,
            "std_abs_dev_e": self.std_abs_dev_e,
            "sample_points": self.sample_points,
        }


def rate_center(t) -> float:
    t = np.asarray(t, dtype=np.float64)
    return 0.5 * (float(t.max()) + float(t.min()))


def _pop_std(x: np.ndarray) -> float:
    # shifting by the first sample keeps constant input exactly at zero
    return float(np.std(x - x[0]))


def deviation_report(curve: Curve) -> DeviationReport:
    if len(curve) == 0:
        raise ValueError("empty curve")
    t = curve.t
    center = rate_center(t)
    rel = t / center - 1.0
    d = curve.e_hv - curve.e_ref
    return DeviationReport(
        mean_t=center,
        max_rel_dev_t=float(np.max(np.abs(rel))),
        std_rel_dev_t=_pop_std(t) / center,
        max_abs_dev_e=float(np.max(np.abs(d))),
        std_abs_dev_e=_pop_std(d),
        sample_points=len(curve),
    )


@dataclass(frozen=True)
class BellTriple:
    a: float
    b: float
    c: float
    lhs: float
    rhs: float

    @property
    def violated(self) -> bool:
        return self.lhs - self.rhs > VIOLATION_TOL

    @property
    def margin(self) -> float:
        return self.lhs - self.rhs

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "lhs": self.lhs,
                "rhs": self.rhs, "violated": self.violated}


def _scalar(v) -> float:
    arr = np.asarray(v, dtype=np.float64)
    if arr.size != 1:
        raise ValueError("expectation callable must return one value per angle")
    return float(arr.reshape(()))


def bell_evaluate(E: Callable[[float], float], a: float, b: float, c: float) -> BellTriple:
    """Both sides of |E(a,b) - E(a,c)| <= 1 + E(b,c).

    ``E`` is a function of the analyzer separation. Separations are folded
    into [0, pi] first, which is exact for the even, 2 pi periodic
    expectations used here and lets one-sided closed forms be passed as is.
    """
    e_ab = _scalar(E(fold_angle(b - a)))
    e_ac = _scalar(E(fold_angle(c - a)))
    e_bc = _scalar(E(fold_angle(c - b)))
    return BellTriple(float(a), float(b), float(c), abs(e_ab - e_ac), 1.0 + e_bc)


def _grid_count(step: float) -> int:
    n = int(round(math.pi / step))
    if n < 3 or abs(n * step - math.pi) > 1e-9:
        raise ValueError("grid step must divide pi into at least 3 parts")
    return n


def _scan_arrays(E, step: float):
    n = _grid_count(step)
    sep = np.arange(n) * step
    try:
        table = np.asarray(E(sep), dtype=np.float64)
    except TypeError:
        table = None
    if table is None or table.shape != sep.shape:
        table = np.array([float(E(float(x))) for x in sep])
    i, j, k = np.meshgrid(np.arange(n), np.arange(n), np.arange(n), indexing="ij")
    keep = (j < k) & (i != j) & (i != k)
    i, j, k = i[keep], j[keep], k[keep]
    lhs = np.abs(table[np.abs(j - i)] - table[np.abs(k - i)])
    rhs = 1.0 + table[k - j]
    return i, j, k, lhs, rhs


def bell_scan(E: Callable, grid_step: float = math.radians(2.0),
              limit: int | None = None) -> list[BellTriple]:
    """Every triple a, b < c (a distinct from both) on a grid over [0, pi).

    Sorted by lhs - rhs, largest violation first; ``limit`` truncates. ``E``
    should accept an array of separations; scalar-only callables also work.
    """
    i, j, k, lhs, rhs = _scan_arrays(E, grid_step)
    order = np.argsort(-(lhs - rhs), kind="stable")
    if limit is not None:
        order = order[:limit]
    return [BellTriple(float(i[o] * grid_step), float(j[o] * grid_step), float(k[o] * grid_step),
                       float(lhs[o]), float(rhs[o])) for o in order]


def count_violations(E: Callable, grid_step: float = math.radians(2.0)) -> int:
    _, _, _, lhs, rhs = _scan_arrays(E, grid_step)
    return int(np.count_nonzero(lhs - rhs > VIOLATION_TOL))


@dataclass(frozen=True)
class TradeoffRow:
    exponent: float
    max_abs_dev_e: float
    max_rel_dev_t: float

    def to_dict(self) -> dict:
        return {"exponent": self.exponent, "max_abs_dev_e": self.max_abs_dev_e,
                "max_rel_dev_t": self.max_rel_dev_t}


def tradeoff_scan(exponents: Iterable[float], cfg: TheoryConfig) -> list[TradeoffRow]:
    """Both error channels for the cos^|p| family at each exponent p."""
    rows = []
    for p in exponents:
        if not p > 0:
            raise ValueError(f"exponent must be positive, got {p!r}")
        sub = replace(cfg, density=DetectionDensity.custom(exponent=float(p)))
        rep = deviation_report(sweep_curve(sub))
        rows.append(TradeoffRow(float(p), rep.max_abs_dev_e, rep.max_rel_dev_t))
    return rows
