import math

import numpy as np
import pytest

from lhvlab.closed_form import naive_expectation, theory1_curves
from lhvlab.core import DetectionDensity, Mode, TheoryConfig, ZeroCoincidenceError
from lhvlab.montecarlo import (
    EventBatch,
    bell_trial,
    estimate_curve,
    run_batches,
    simulate_batch,
)
from lhvlab.quadrature import QuadratureGrid, integrals

PROJ = DetectionDensity.projection()
POW = DetectionDensity.signed_power()
NAIVE = DetectionDensity.naive()
ONE = DetectionDensity.custom(func=lambda x: np.ones_like(x))


def test_stderr_at_reference():
    b = EventBatch(0.0, 100, 50, 50, 60, 60)
    assert b.e_stderr == 0.0
    assert b.e_stderr_at(0.6) == pytest.approx(0.8 / math.sqrt(50))


def test_always_detecting_source():
    b = simulate_batch(ONE, 0.7, 10_000, Mode.CORRELATED, seed=1)
    assert b.coincidences == b.singles_a == b.singles_b == 10_000
    assert b.e_estimate == 1.0 and b.e_stderr == 0.0
    assert b.t_estimate == pytest.approx(2 * math.pi)
    anti = simulate_batch(ONE, 0.7, 1000, Mode.ANTICORRELATED, seed=1)
    assert anti.e_estimate == -1.0


def test_projection_aligned_is_perfectly_anticorrelated():
    b = simulate_batch(PROJ, 0.0, 100_000, Mode.ANTICORRELATED, seed=3)
    assert b.e_estimate == -1.0


def test_projection_sixty_degrees():
    b = simulate_batch(PROJ, math.pi / 3, 1_000_000, Mode.ANTICORRELATED, seed=42)
    exact = theory1_curves(math.pi / 3).e_hv1
    assert abs(b.e_estimate - exact) <= 3 * b.e_stderr


def test_naive_line():
    for phi in (0.4, 1.5, 2.8):
        b = simulate_batch(NAIVE, phi, 200_000, Mode.ANTICORRELATED, seed=7)
        assert b.coincidences == 200_000
        assert abs(b.e_estimate - naive_expectation(phi)) <= 4 * b.e_stderr + 1e-12


def test_reproducible_streams():
    a = simulate_batch(POW, 1.0, 50_000, Mode.CORRELATED, seed=9, stream=3)
    b = simulate_batch(POW, 1.0, 50_000, Mode.CORRELATED, seed=9, stream=3)
    c = simulate_batch(POW, 1.0, 50_000, Mode.CORRELATED, seed=9, stream=4)
    assert a == b and a != c


def test_chunking_does_not_change_results():
    a = simulate_batch(PROJ, 1.0, 10_000, Mode.ANTICORRELATED, seed=5)
    b = simulate_batch(PROJ, 1.0, 10_000, Mode.ANTICORRELATED, seed=5, chunk=10_000)
    assert a == b


def test_worker_count_independence():
    cfg = TheoryConfig(POW, Mode.CORRELATED, phi_points=9, pairs_per_angle=20_000, seed=11)
    assert run_batches(cfg, workers=1) == run_batches(cfg, workers=4)


def test_singles_rates():
    # single-side rate is the mean of |f| over a period
    expected = {"proj": 2 / math.pi, "pow": 0.8098014259192973, "naive": 1.0}
    for d in (PROJ, POW, NAIVE):
        b = simulate_batch(d, 0.5, 400_000, Mode.CORRELATED, seed=2)
        p = expected[d.family.value]
        se = math.sqrt(p * (1 - p) / b.pairs_emitted) + 1e-12
        assert abs(b.singles_a / b.pairs_emitted - p) <= 4 * se
        assert abs(b.singles_b / b.pairs_emitted - p) <= 4 * se


def test_pow_rate_is_concave_up():
    cfg = TheoryConfig(POW, Mode.CORRELATED, phi_points=11, pairs_per_angle=400_000, seed=4)
    curve = estimate_curve(cfg)
    t = curve.t
    assert t[5] < t[0] and t[5] < t[-1]
    assert t[0] + t[-1] - 2 * t[5] > 4 * math.sqrt(6) * curve.se_t[5]


def test_projection_rate_spread():
    cfg = TheoryConfig(PROJ, Mode.ANTICORRELATED, phi_points=50, pairs_per_angle=200_000, seed=8)
    t = estimate_curve(cfg).t
    center = (t.max() + t.min()) / 2
    assert np.max(np.abs(t / center - 1)) == pytest.approx(0.2222, abs=0.01)


def test_bell_trial():
    tr = bell_trial(PROJ, 0.0, math.pi / 3, 2 * math.pi / 3, 200_000, Mode.ANTICORRELATED, seed=1)
    assert tr.lhs == pytest.approx(1.3928, abs=6 * tr.lhs_se)
    assert tr.rhs == pytest.approx(0.3036, abs=6 * tr.rhs_se)
    assert tr.violated
    with pytest.raises(ValueError):
        bell_trial(PROJ, 0.0, 0.0, 1.0, 10, Mode.ANTICORRELATED, seed=1)


def _zero(x):
    return np.zeros_like(x)


def test_zero_coincidences():
    b = simulate_batch(DetectionDensity.custom(func=_zero), 0.3, 1000, Mode.CORRELATED, seed=1)
    assert b.coincidences == 0
    with pytest.raises(ZeroCoincidenceError):
        b.e_estimate


def test_event_batch_validation():
    with pytest.raises(ValueError):
        EventBatch(0.0, 10, 5, 0, 4, 8)
    with pytest.raises(ValueError):
        EventBatch(0.0, 10, 3, 4, 4, 4)
    a = EventBatch(0.0, 10, 3, 1, 5, 6)
    m = a.merge(EventBatch(0.0, 20, 4, -2, 9, 9))
    assert (m.pairs_emitted, m.coincidences, m.spin_product_sum) == (30, 7, -1)
    with pytest.raises(ValueError):
        a.merge(EventBatch(1.0, 10, 3, 1, 5, 6))
    with pytest.raises(ValueError):
        simulate_batch(PROJ, 0.0, 0, Mode.CORRELATED, seed=1)


@pytest.mark.parametrize("d,mode", [(PROJ, Mode.ANTICORRELATED), (POW, Mode.CORRELATED),
                                    (NAIVE, Mode.ANTICORRELATED)], ids=["proj", "pow", "naive"])
def test_estimates_within_four_standard_errors(d, mode):
    phi = np.random.default_rng(0).uniform(0, math.pi, 5)
    c, t = integrals(d, phi, QuadratureGrid.make(10_000))
    e_ref = mode.sigma * c / t
    for seed in range(1, 21):
        batches = run_batches(TheoryConfig(d, mode, pairs_per_angle=100_000, seed=seed), phi)
        for b, e, tt in zip(batches, e_ref, t):
            assert abs(b.e_estimate - e) <= 4 * b.e_stderr_at(e) + 1e-12
            assert abs(b.t_estimate - tt) <= 4 * b.t_stderr
