import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from amisel.core import TradeoffPoint
from amisel.regression import DegenerateFitError, SlopeModel, adjusted_line, fit_line, residual



def P(t, a):
    return TradeoffPoint(t, a)


def test_two_point_fit():
    m = fit_line([P(1, 1), P(2, 2)])
    assert m.slope == pytest.approx(1) and m.intercept == pytest.approx(0, abs=1e-12)


def test_three_point_closed_form():
    # times 1,2,3 stand in for 0,1,2 shifted by one: slope unchanged, intercept shifts by -slope
    m = fit_line([P(1, 0), P(2, 1), P(3, 1)])
    assert m.slope == pytest.approx(0.5)
    assert m.intercept + m.slope * 1 == pytest.approx(1 / 6)


def test_constant_accuracy():
    m = fit_line([P(1, 5), P(2, 5), P(3, 5)])
    assert m.slope == 0 and m.intercept == pytest.approx(5)


def test_degenerate_fits():
    with pytest.raises(DegenerateFitError):
        fit_line([P(1, 1)])
    with pytest.raises(DegenerateFitError):
        fit_line([P(4, 1), P(4, 7)])


def test_adjusted_line_examples():
    m = SlopeModel(1.0, 0.0, (2.0, 2.0))
    assert adjusted_line(m, 1.0) == m
    adj = adjusted_line(m, 2.0)
    assert adj.slope == 2 and adj.intercept == pytest.approx(-2)
    fitted = fit_line([P(1, 0), P(2, 1), P(3, 1)])
    small = adjusted_line(fitted, 0.001)
    assert small.slope == pytest.approx(0.0005)
    assert small.predict(fitted.centroid[0]) == pytest.approx(fitted.centroid[1])
    for bad in (0.0, -1.0, math.inf, math.nan):
        with pytest.raises(ValueError):
            adjusted_line(m, bad)


def test_residual_examples():
    m = SlopeModel(1.0, 0.0, (0.0, 0.0))
    assert residual(m, P(10, 15)) == pytest.approx(5)
    assert residual(m, P(3, 3)) == 0


samples = st.lists(
    st.tuples(st.floats(0.5, 200), st.floats(0, 100)), min_size=2, max_size=40
).filter(lambda xs: max(t for t, _ in xs) - min(t for t, _ in xs) > 1e-3)


@given(samples)
def test_centroid_on_line_and_ols_identities(xs):
    points = [P(t, a) for t, a in xs]
    m = fit_line(points)
    tm, am = m.centroid
    assert m.predict(tm) == pytest.approx(am, rel=1e-9, abs=1e-9)
    r = [residual(m, p) for p in points]
    scale = sum(abs(x) for x in r) + 1e-12 + sum(abs(p.accuracy - am) for p in points)
    assert abs(math.fsum(r)) <= 1e-9 * scale
    assert abs(math.fsum(ri * (p.time_ms - tm) for ri, p in zip(r, points))) <= 1e-9 * scale * max(
        abs(p.time_ms - tm) for p in points
    )


@given(samples, st.sampled_from([0.1, 3.0, 1000.0]))
def test_time_unit_invariance(xs, gamma):
    points = [P(t, a) for t, a in xs]
    scaled = [P(t * gamma, a) for t, a in xs]
    r1 = [residual(fit_line(points), p) for p in points]
    r2 = [residual(fit_line(scaled), p) for p in scaled]
    assert r2 == pytest.approx(r1, abs=1e-9 * (1 + max(abs(x) for x in r1)))


@given(samples, st.sampled_from([0.5, 2.0]), st.sampled_from([-10.0, 10.0]))
def test_accuracy_affine_equivariance(xs, alpha, beta):
    points = [P(t, a) for t, a in xs]
    moved = [P(t, alpha * a + beta) for t, a in xs]
    r1 = [residual(fit_line(points), p) for p in points]
    r2 = [residual(fit_line(moved), p) for p in moved]
    assert r2 == pytest.approx([alpha * x for x in r1], abs=1e-9 * (1 + max(abs(x) for x in r1)))


@given(st.floats(-5, 5), st.floats(1e-3, 3), st.floats(1e-3, 3))
def test_factor_composition(slope, f1, f2):
    m = SlopeModel(slope, 3.0 - slope * 7.0, (7.0, 3.0))
    a = adjusted_line(adjusted_line(m, f1), f2)
    b = adjusted_line(m, f1 * f2)
    assert a.slope == pytest.approx(b.slope, rel=1e-12, abs=1e-300)
    assert a.intercept == pytest.approx(b.intercept, rel=1e-12, abs=1e-12)
