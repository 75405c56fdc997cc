"""Pure numpy versions of the compiled kernels in ``_kernels.pyx``."""

from __future__ import annotations

import numpy as np

NAIVE, PROJECTION, SIGNED_POWER = 0, 1, 2
COS_FLOOR = 1e-15


def _density(x: np.ndarray, family: int, exponent: float) -> np.ndarray:
    a = np.cos(x)
    if family == PROJECTION:
        return a
    a = np.where(np.abs(a) < COS_FLOOR, 0.0, a)
    if family == NAIVE:
        return np.where(a >= 0.0, 1.0, -1.0)
    return np.copysign(np.abs(a) ** exponent, a)


def tally_values(fa, fb, ua, ub, sigma: int) -> tuple[int, int, int, int]:
    fa = np.asarray(fa, dtype=np.float64)
    fb = np.asarray(fb, dtype=np.float64)
    if not (fa.shape == fb.shape == np.shape(ua) == np.shape(ub)):
        raise ValueError("chunk arrays must have equal length")
    da = ua < np.abs(fa)
    db = ub < np.abs(fb)
    both = da & db
    same = (fa[both] > 0.0) == (fb[both] > 0.0)
    n_both = int(np.count_nonzero(both))
    n_same = int(np.count_nonzero(same))
    prod = sigma * (2 * n_same - n_both)
    return n_both, prod, int(np.count_nonzero(da)), int(np.count_nonzero(db))


def tally_builtin(theta, ua, ub, phi: float, family: int, exponent: float,
                  sigma: int) -> tuple[int, int, int, int]:
    theta = np.asarray(theta, dtype=np.float64)
    fa = _density(theta, family, exponent)
    fb = _density(theta - phi, family, exponent)
    return tally_values(fa, fb, ua, ub, sigma)


def dft_direct(x, inverse: bool = False) -> np.ndarray:
    x = np.asarray(x, dtype=np.complex128)
    n = x.shape[0]
    if n == 0:
        return np.empty(0, dtype=np.complex128)
    m = np.arange(n)
    sign = 1.0 if inverse else -1.0
    table = np.cos(2.0 * np.pi * m / n) + 1j * sign * np.sin(2.0 * np.pi * m / n)
    out = table[np.outer(m, m) % n] @ x
    return out / n if inverse else out
