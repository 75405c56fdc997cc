"""Event-level simulation of pair emission and probabilistic detection.

Each pair carries one hidden angle theta, uniform on [0, 2 pi). Detector A
fires with probability |f(theta)| and reports sign f(theta); detector B fires
independently with probability |f(theta - phi)| and reports the mode sign
times sign f(theta - phi).

Random streams come from numpy's PCG64 seeded through ``SeedSequence(seed,
spawn_key=(stream,))``, so every angle of a sweep owns an independent stream
and results do not depend on evaluation order or worker count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import (
    TWO_PI,
    Curve,
    CurvePoint,
    DetectionDensity,
    Mode,
    TheoryConfig,
    ZeroCoincidenceError,
    phi_grid,
    qm_expectation,
)

CHUNK = 1 << 16


@dataclass(frozen=True)
class EventBatch:
    phi: float
    pairs_emitted: int
    coincidences: int
    spin_product_sum: int  # mode sign already applied
    singles_a: int
    singles_b: int

    def __post_init__(self):
        if not self.coincidences <= min(self.singles_a, self.singles_b) <= self.pairs_emitted:
            raise ValueError("inconsistent tallies")
        if abs(self.spin_product_sum) > self.coincidences:
            raise ValueError("spin product sum exceeds coincidences")

    @property
    def e_estimate(self) -> float:
        if self.coincidences == 0:
            raise ZeroCoincidenceError(f"no coincidences at phi={self.phi:.6g}")
        return self.spin_product_sum / self.coincidences

    @property
    def e_stderr(self) -> float:
        e = self.e_estimate
        return math.sqrt(max(1.0 - e * e, 0.0) / self.coincidences)

    def e_stderr_at(self, e_true: float) -> float:
        """Standard error the estimate would have if the true value were ``e_true``.

        The plug-in :attr:`e_stderr` collapses to zero when every coincidence
        happens to agree, so tests against a reference value use this one.
        """
        if self.coincidences == 0:
            raise ZeroCoincidenceError(f"no coincidences at phi={self.phi:.6g}")
        return math.sqrt(max(1.0 - e_true * e_true, 0.0) / self.coincidences)

    @property
    def t_estimate(self) -> float:
        return TWO_PI * self.coincidences / self.pairs_emitted

    @property
    def t_stderr(self) -> float:
        p = self.coincidences / self.pairs_emitted
        return TWO_PI * math.sqrt(p * (1.0 - p) / self.pairs_emitted)

    def merge(self, other: EventBatch) -> EventBatch:
        """Pool two batches taken at the same angle."""
        if other.phi != self.phi:
            raise ValueError("can only merge batches at the same angle")
        return EventBatch(
            self.phi,
            self.pairs_emitted + other.pairs_emitted,
            self.coincidences + other.coincidences,
            self.spin_product_sum + other.spin_product_sum,
            self.singles_a + other.singles_a,
            self.singles_b + other.singles_b,
        )


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(stream,))))


def simulate_batch(d: DetectionDensity, phi: float, n_pairs: int, mode: Mode,
                   seed: int, stream: int = 0, *, chunk: int = CHUNK) -> EventBatch:
    """Simulate ``n_pairs`` emitted pairs at analyzer separation ``phi``."""
    if n_pairs < 1:
        raise ValueError("n_pairs must be >= 1")
    rng = make_rng(seed, stream)
    code = d.kernel_code
    sigma = mode.sigma
    totals = [0, 0, 0, 0]
    left = n_pairs
    while left > 0:
        m = min(chunk, left)
        theta = rng.random(m) * TWO_PI
        ua = rng.random(m)
        ub = rng.random(m)
        if code is None:
            counts = kernels.tally_values(d(theta), d(theta - phi), ua, ub, sigma)
        else:
            counts = kernels.tally_builtin(theta, ua, ub, float(phi), code,
                                           d.kernel_exponent, sigma)
        for i, v in enumerate(counts):
            totals[i] += int(v)
        left -= m
    coinc, prod, sa, sb = totals
    return EventBatch(float(phi), n_pairs, coinc, prod, sa, sb)


def run_batches(cfg: TheoryConfig, phi=None, *, workers: int = 1) -> list[EventBatch]:
    """One batch per angle; angle i draws from stream i of ``cfg.seed``."""
    if phi is None:
        phi = phi_grid(cfg.phi_points, cfg.grid_mode)
    phi = [float(p) for p in np.atleast_1d(phi)]

    def job(i: int) -> EventBatch:
        return simulate_batch(cfg.density, phi[i], cfg.pairs_per_angle,
                              cfg.correlation_mode, cfg.seed, i)

    if workers <= 1:
        return [job(i) for i in range(len(phi))]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(job, range(len(phi))))


def curve_from_batches(batches: list[EventBatch], mode: Mode) -> Curve:
    points = []
    for b in batches:
        e = b.e_estimate
        t = b.t_estimate
        points.append(CurvePoint(b.phi, mode.sigma * e * t, t, e,
                                 float(qm_expectation(b.phi, mode)),
                                 se_e=b.e_stderr, se_t=b.t_stderr))
    return Curve(tuple(points), "mc")


def estimate_curve(cfg: TheoryConfig, phi=None, *, workers: int = 1) -> Curve:
    """Monte Carlo curve with per-point standard errors."""
    return curve_from_batches(run_batches(cfg, phi, workers=workers), cfg.correlation_mode)


@dataclass(frozen=True)
class BellTrial:
    lhs: float
    rhs: float
    lhs_se: float
    rhs_se: float

    @property
    def violated(self) -> bool:
        return self.lhs > self.rhs


def bell_trial(d: DetectionDensity, a: float, b: float, c: float, n_pairs: int,
               mode: Mode, seed: int) -> BellTrial:
    """Estimate both sides of |E(a,b) - E(a,c)| <= 1 + E(b,c) from three runs."""
    if len({a, b, c}) != 3:
        raise ValueError("analyzer angles must be distinct")
    e_ab = simulate_batch(d, b - a, n_pairs, mode, seed, 0)
    e_ac = simulate_batch(d, c - a, n_pairs, mode, seed, 1)
    e_bc = simulate_batch(d, c - b, n_pairs, mode, seed, 2)
    lhs = abs(e_ab.e_estimate - e_ac.e_estimate)
    lhs_se = math.hypot(e_ab.e_stderr, e_ac.e_stderr)
    return BellTrial(lhs, 1.0 + e_bc.e_estimate, lhs_se, e_bc.e_stderr)
