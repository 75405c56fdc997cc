import math

import numpy as np
import pytest

from lhvlab import kernels

BACKENDS = kernels.available_backends()


def test_active_backend_is_known():
    assert kernels.BACKEND in BACKENDS
    assert kernels.tally_builtin is BACKENDS[kernels.BACKEND].tally_builtin


@pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")
@pytest.mark.parametrize("family,exponent", [(0, 1.0), (1, 1.0), (2, math.exp(-1)), (2, 2.5)])
@pytest.mark.parametrize("sigma", [-1, 1])
def test_tally_parity(family, exponent, sigma):
    rng = np.random.default_rng(family * 10 + sigma + 1)
    theta = rng.random(50_000) * 2 * math.pi
    ua, ub = rng.random((2, 50_000))
    # include exact zeros of cos to exercise the floor
    theta[:4] = [math.pi / 2, 3 * math.pi / 2, 0.0, math.pi]
    args = (theta, ua, ub, 0.9, family, exponent, sigma)
    got = BACKENDS["compiled"].tally_builtin(*args)
    want = BACKENDS["python"].tally_builtin(*args)
    assert tuple(map(int, got)) == tuple(map(int, want))


@pytest.mark.skipif("compiled" not in BACKENDS, reason="extension not built")
def test_tally_values_parity():
    rng = np.random.default_rng(1)
    fa, fb = rng.uniform(-1, 1, (2, 10_000))
    ua, ub = rng.random((2, 10_000))
    got = BACKENDS["compiled"].tally_values(fa, fb, ua, ub, -1)
    want = BACKENDS["python"].tally_values(fa, fb, ua, ub, -1)
    assert tuple(map(int, got)) == tuple(map(int, want))


@pytest.mark.parametrize("name", sorted(BACKENDS))
@pytest.mark.parametrize("n", [1, 7, 64, 200])
def test_dft_against_numpy(name, n):
    x = np.random.default_rng(n).normal(size=n) + 1j * np.random.default_rng(n + 1).normal(size=n)
    k = BACKENDS[name]
    np.testing.assert_allclose(k.dft_direct(x, False), np.fft.fft(x), atol=1e-9, rtol=0)
    np.testing.assert_allclose(k.dft_direct(x, True), np.fft.ifft(x), atol=1e-9, rtol=0)


@pytest.mark.parametrize("name", sorted(BACKENDS))
def test_tally_length_mismatch(name):
    with pytest.raises(ValueError):
        BACKENDS[name].tally_values(np.zeros(3), np.zeros(4), np.zeros(3), np.zeros(3), 1)
