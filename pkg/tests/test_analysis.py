import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from lhvlab.analysis import (
    DeviationReport,
    bell_evaluate,
    bell_scan,
    count_violations,
    deviation_report,
    tradeoff_scan,
)
from lhvlab.closed_form import closed_curve, naive_expectation, theory1_curves
from lhvlab.core import (
    INV_E,
    Curve,
    CurvePoint,
    DetectionDensity,
    GridMode,
    Mode,
    TheoryConfig,
    phi_grid,
)
from lhvlab.quadrature import QuadratureGrid, quad_curve, sweep_curve

PROJ = DetectionDensity.projection()
POW = DetectionDensity.signed_power()
PAPER_CFG = TheoryConfig(POW, Mode.CORRELATED, grid_mode=GridMode.PAPER)


def _theory1_e(p):
    return theory1_curves(p).e_hv1


def _qm_anti(p):
    return -np.cos(p)


def _qm_corr(p):
    return np.cos(p)


def test_theory1_statistics():
    rep = deviation_report(closed_curve(PROJ, phi_grid(50), Mode.ANTICORRELATED))
    assert rep.mean_t / 2 == pytest.approx(1.2853, abs=1e-3)
    assert rep.max_rel_dev_t == pytest.approx(0.223, abs=0.003)
    assert rep.std_rel_dev_t == pytest.approx(0.157, abs=0.005)
    assert rep.max_abs_dev_e == pytest.approx(0.198, abs=0.003)
    assert rep.std_abs_dev_e == pytest.approx(0.127, abs=0.005)
    assert rep.sample_points == 50


def test_theory2_statistics():
    rep = deviation_report(sweep_curve(PAPER_CFG))
    assert rep.mean_t / 2 == pytest.approx(2.07, abs=0.02)
    assert rep.max_abs_dev_e == pytest.approx(0.012, abs=0.003)
    assert rep.std_abs_dev_e == pytest.approx(0.008, abs=0.002)
    assert rep.max_rel_dev_t == pytest.approx(0.057, abs=0.007)
    assert rep.std_rel_dev_t == pytest.approx(0.037, abs=0.005)
    assert rep.to_dict()["half_mean_t"] == rep.mean_t / 2


def test_empty_curve():
    with pytest.raises(ValueError):
        deviation_report(Curve(()))


def test_constant_curve_has_zero_deviation():
    pts = [CurvePoint(p, 0.1, 2.3, 0.37, 0.37) for p in np.linspace(0, 3, 17)]
    rep = deviation_report(Curve(pts))
    assert (rep.max_rel_dev_t, rep.std_rel_dev_t, rep.max_abs_dev_e, rep.std_abs_dev_e) == (0, 0, 0, 0)
    assert rep.mean_t == 2.3


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.floats(0.1, 10), st.floats(-1, 1), st.floats(-1, 1)),
                min_size=1, max_size=40))
def test_std_bounded_by_max(rows):
    pts = [CurvePoint(float(i), 0.0, t, e, r) for i, (t, e, r) in enumerate(rows)]
    rep = deviation_report(Curve(pts))
    assert isinstance(rep, DeviationReport)
    assert rep.std_rel_dev_t <= rep.max_rel_dev_t + 1e-12
    assert rep.std_abs_dev_e <= rep.max_abs_dev_e + 1e-12


def test_bell_evaluate_examples():
    tr = bell_evaluate(_theory1_e, 0.0, math.pi / 3, 2 * math.pi / 3)
    assert tr.lhs == pytest.approx(1.39277, abs=1e-5)
    assert tr.rhs == pytest.approx(0.30362, abs=1e-5)
    assert tr.violated
    zero = bell_evaluate(lambda p: 0.0, 0.3, 1.1, 2.0)
    assert (zero.lhs, zero.rhs, zero.violated) == (0.0, 1.0, False)


def test_bell_evaluate_naive_tie():
    # 1 + E(pi/3) = 2/3 equals the left side exactly: a tie, not a violation
    tr = bell_evaluate(naive_expectation, 0.0, math.pi / 3, 2 * math.pi / 3)
    assert tr.lhs == pytest.approx(2 / 3, abs=1e-12)
    assert tr.rhs == pytest.approx(2 / 3, abs=1e-12)
    assert not tr.violated


def test_bell_triple_dict():
    d = bell_evaluate(_qm_anti, 0.0, 1.0, 2.0).to_dict()
    assert set(d) == {"a", "b", "c", "lhs", "rhs", "violated"}


@settings(max_examples=100, deadline=None)
@given(st.floats(0, math.pi), st.floats(0, math.pi), st.floats(0, math.pi), st.floats(-10, 10))
def test_bell_rotation_invariance(a, b, c, delta):
    for E in (_theory1_e, _qm_corr):
        x = bell_evaluate(E, a, b, c)
        y = bell_evaluate(E, a + delta, b + delta, c + delta)
        assert abs(x.lhs - y.lhs) <= 1e-12 and abs(x.rhs - y.rhs) <= 1e-12


def _brute_force_scan(E, n):
    step = math.pi / n
    best, count = -math.inf, 0
    for i, j, k in itertools.product(range(n), repeat=3):
        if not (j < k and i != j and i != k):
            continue
        lhs = abs(E(abs(j - i) * step) - E(abs(k - i) * step))
        rhs = 1.0 + E((k - j) * step)
        best = max(best, lhs - rhs)
        count += lhs - rhs > 1e-12
    return best, count


def test_qm_scan_extremal_geometry():
    triples = bell_scan(_qm_anti, math.radians(10))
    top = triples[0]
    assert top.margin == pytest.approx(0.5, abs=1e-12)
    assert any(t.a == 0.0 and t.b == pytest.approx(math.pi / 3) and t.c == pytest.approx(2 * math.pi / 3)
               and t.margin == pytest.approx(0.5, abs=1e-12) for t in triples)
    margins = [t.margin for t in triples]
    assert margins == sorted(margins, reverse=True)
    best, count = _brute_force_scan(lambda p: -math.cos(p), 18)
    assert top.margin == pytest.approx(best, abs=1e-15)
    assert count_violations(_qm_anti, math.radians(10)) == count


def test_scan_limit_and_step_validation():
    assert len(bell_scan(_qm_anti, math.radians(10), limit=5)) == 5
    with pytest.raises(ValueError):
        bell_scan(_qm_anti, math.radians(7))
    # scalar-only callables still work
    assert count_violations(lambda p: -math.cos(p), math.radians(10)) == count_violations(_qm_anti, math.radians(10))


def test_naive_scan_never_violates():
    assert count_violations(naive_expectation, math.radians(10)) == 0
    assert not bell_scan(naive_expectation, math.radians(10))[0].violated


def test_theory2_violation_count_tracks_qm():
    g = QuadratureGrid.make(50, GridMode.PAPER)
    e2 = lambda p: quad_curve(POW, np.atleast_1d(p), Mode.CORRELATED, g).e_hv
    step = math.radians(10)
    assert abs(count_violations(e2, step) - count_violations(_qm_corr, step)) <= 2


def test_tradeoff_rows():
    rows = tradeoff_scan([1.0, INV_E - 0.05, INV_E, INV_E + 0.05], PAPER_CFG)
    one, lo, mid, hi = rows
    assert one.max_abs_dev_e == pytest.approx(0.198, abs=0.003)
    assert one.max_rel_dev_t == pytest.approx(0.223, abs=0.003)
    assert mid.max_abs_dev_e == pytest.approx(0.012, abs=0.003)
    assert mid.max_rel_dev_t == pytest.approx(0.057, abs=0.007)
    # moving off 1/e never improves both channels at once
    for r in (lo, hi):
        assert r.max_abs_dev_e >= mid.max_abs_dev_e or r.max_rel_dev_t >= mid.max_rel_dev_t
    assert set(mid.to_dict()) == {"exponent", "max_abs_dev_e", "max_rel_dev_t"}
    with pytest.raises(ValueError):
        tradeoff_scan([0.0], PAPER_CFG)
