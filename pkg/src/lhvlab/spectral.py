"""Correlation and pair rate as circular autoconvolutions.

Squaring the discrete spectrum of the sampled density and transforming back
gives the circular autoconvolution. For an even density it coincides with the
correlation integral, so this path and the quadrature path must agree at
shared nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .core import TWO_PI, Curve, DetectionDensity, Mode, NotEvenError, build_curve

EVEN_TOL = 1e-12


@dataclass(frozen=True)
class SampledSignal:
    """Samples of a 2 pi periodic function at nodes 2 pi k / N."""

    samples: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.samples, dtype=np.float64)
        if s.ndim != 1 or s.size < 4:
            raise ValueError("need a 1-d signal with at least 4 samples")
        s.setflags(write=False)
        object.__setattr__(self, "samples", s)

    @property
    def n(self) -> int:
        return self.samples.size

    @property
    def period(self) -> float:
        return TWO_PI

    @property
    def nodes(self) -> np.ndarray:
        return np.arange(self.n) * (TWO_PI / self.n)

    @classmethod
    def of(cls, d: DetectionDensity, n: int) -> SampledSignal:
        return cls(d(symmetric_nodes(n)))


def symmetric_nodes(n: int) -> np.ndarray:
    """Nodes 2 pi k/N written in (-pi, pi], so node N-k is exactly minus node k.

    Sampling an even density there gives exactly mirrored samples; near the
    zeros of cos a fractional power would otherwise blow rounding up to ~1e-6.
    """
    k = np.arange(n)
    return np.where(2 * k <= n, k, k - n) * (TWO_PI / n)


def dft(s) -> np.ndarray:
    """Unnormalized forward transform, X_k = sum_j x_j exp(-2 pi i jk/N)."""
    x = s.samples if isinstance(s, SampledSignal) else s
    return kernels.dft_direct(np.asarray(x, dtype=np.complex128), False)


def idft(spectrum) -> np.ndarray:
    """Inverse of :func:`dft` (carries the 1/N)."""
    return kernels.dft_direct(np.asarray(spectrum, dtype=np.complex128), True)


def autoconvolve_complex(s: SampledSignal) -> np.ndarray:
    """Autoconvolution before the imaginary round-off is dropped."""
    return idft(dft(s) ** 2) * (TWO_PI / s.n)


def autoconvolve(s: SampledSignal) -> SampledSignal:
    """Samples of the integral of f(theta) f(x - theta) over one period."""
    return SampledSignal(autoconvolve_complex(s).real)


def is_even(s: SampledSignal, tol: float = EVEN_TOL) -> bool:
    x = s.samples
    mirrored = x[(-np.arange(s.n)) % s.n]
    return bool(np.max(np.abs(x - mirrored)) <= tol)


def spectral_curve(d: DetectionDensity, n: int, mode: Mode) -> Curve:
    """Curve at all N nodes 2 pi k/N, k < N, from autoconvolutions of f and |f|."""
    if n < 4:
        raise ValueError("need at least 4 nodes")
    s = SampledSignal.of(d, n)
    if not is_even(s):
        raise NotEvenError(f"density {d.label} is not even; convolution != correlation")
    c = autoconvolve(s).samples
    t = autoconvolve(SampledSignal(np.abs(s.samples))).samples
    return build_curve(s.nodes, c, t, mode, "dft")


def half_period_nodes(n: int) -> np.ndarray:
    """Indices of nodes 2 pi k/N lying in [0, pi]."""
    return np.flatnonzero(np.arange(n) * (TWO_PI / n) <= math.pi + 1e-12)
