# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops.

Every routine here has a numpy twin in :mod:`lhvlab._fallback` with the same
signature and, up to libm rounding, the same output. Keep the two in step.
"""

import numpy as np

from libc.math cimport cos, sin, pow, fabs, copysign, M_PI

cdef enum:
    NAIVE = 0
    PROJECTION = 1
    SIGNED_POWER = 2

cdef double COS_FLOOR = 1e-15


cdef inline double _density(double x, int family, double exponent) noexcept nogil:
    cdef double a = cos(x)
    if family == PROJECTION:
        return a
    if fabs(a) < COS_FLOOR:
        a = 0.0
    if family == NAIVE:
        return 1.0 if a >= 0.0 else -1.0
    return copysign(pow(fabs(a), exponent), a)


def tally_builtin(const double[::1] theta, const double[::1] ua,
                  const double[::1] ub, double phi, int family,
                  double exponent, int sigma):
    """Detection tallies for one chunk of pairs with a built-in density.

    Returns ``(coincidences, spin_product_sum, singles_a, singles_b)``.
    """
    cdef Py_ssize_t i, n = theta.shape[0]
    cdef long long coinc = 0, prod = 0, sa = 0, sb = 0
    cdef double fa, fb
    cdef bint da, db
    if ua.shape[0] != n or ub.shape[0] != n:
        raise ValueError("chunk arrays must have equal length")
    with nogil:
        for i in range(n):
            fa = _density(theta[i], family, exponent)
            fb = _density(theta[i] - phi, family, exponent)
            da = ua[i] < fabs(fa)
            db = ub[i] < fabs(fb)
            sa += da
            sb += db
            if da and db:
                coinc += 1
                if (fa > 0.0) == (fb > 0.0):
                    prod += sigma
                else:
                    prod -= sigma
    return coinc, prod, sa, sb


def tally_values(const double[::1] fa, const double[::1] fb,
                 const double[::1] ua, const double[::1] ub, int sigma):
    """Same tallies as :func:`tally_builtin` from pre-evaluated densities."""
    cdef Py_ssize_t i, n = fa.shape[0]
    cdef long long coinc = 0, prod = 0, sa = 0, sb = 0
    cdef bint da, db
    if fb.shape[0] != n or ua.shape[0] != n or ub.shape[0] != n:
        raise ValueError("chunk arrays must have equal length")
    with nogil:
        for i in range(n):
            da = ua[i] < fabs(fa[i])
            db = ub[i] < fabs(fb[i])
            sa += da
            sb += db
            if da and db:
                coinc += 1
                if (fa[i] > 0.0) == (fb[i] > 0.0):
                    prod += sigma
                else:
                    prod -= sigma
    return coinc, prod, sa, sb


def dft_direct(x, bint inverse=False):
    """Unnormalized O(N^2) discrete Fourier transform.

    Forward uses exp(-2 pi i jk/N); inverse flips the sign and divides by N.
    Twiddles are looked up by (jk mod N) so large products keep full accuracy.
    """
    cdef double complex[::1] xv = np.ascontiguousarray(x, dtype=np.complex128)
    cdef Py_ssize_t n = xv.shape[0]
    cdef Py_ssize_t j, k, m
    cdef double sign = 1.0 if inverse else -1.0
    cdef double re, im, wr, wi, xr, xi
    out = np.empty(n, dtype=np.complex128)
    cdef double complex[::1] ov = out
    tw = np.empty((n, 2), dtype=np.float64)
    cdef double[:, ::1] twv = tw
    if n == 0:
        return out
    for m in range(n):
        twv[m, 0] = cos(2.0 * M_PI * m / n)
        twv[m, 1] = sign * sin(2.0 * M_PI * m / n)
    with nogil:
        for k in range(n):
            re = 0.0
            im = 0.0
            m = 0
            for j in range(n):
                wr = twv[m, 0]
                wi = twv[m, 1]
                xr = xv[j].real
                xi = xv[j].imag
                re = re + xr * wr - xi * wi
                im = im + xr * wi + xi * wr
                m = m + k
                if m >= n:
                    m = m - n
            if inverse:
                ov[k] = (re + 1j * im) / n
            else:
                ov[k] = re + 1j * im
    return out
