import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from amisel.core import AmiselError, CandidateId, TradeoffPoint
from amisel.pareto import dominates, wrap_line


def P(t, a):
    return TradeoffPoint(t, a)


def brute_force_front(points):
    """All points no other point dominates, deduplicated by the name tie rule, by time."""
    keep = [
        (c, p)
        for c, p in points
        if not any(dominates(q, p) for d, q in points if d != c)
    ]
    best = {}
    for c, p in keep:
        key = (p.time_ms, p.accuracy)
        if key not in best or c.sort_key < best[key][0].sort_key:
            best[key] = (c, p)
    return sorted(best.values(), key=lambda cp: cp[1].time_ms)


def test_dominates_examples():
    assert dominates(P(10, 80), P(20, 70))
    assert not dominates(P(10, 80), P(10, 80))
    assert not dominates(P(10, 70), P(20, 80))
    assert dominates(P(10, 80), P(10, 70))


def test_wrap_line_small_example():
    a, b, c = CandidateId("A"), CandidateId("B"), CandidateId("C")
    front = wrap_line([(a, P(10, 50)), (b, P(20, 60)), (c, P(15, 40))])
    assert front.points == ((a, P(10, 50)), (b, P(20, 60)))


def test_wrap_line_single_and_empty():
    a = CandidateId("A")
    assert wrap_line([(a, P(3, 4))]).points == ((a, P(3, 4)),)
    with pytest.raises(AmiselError):
        wrap_line([])


def test_tie_rules():
    pts = [
        (CandidateId("z"), P(10, 50)),
        (CandidateId("b"), P(10, 50)),
        (CandidateId("c"), P(10, 40)),
        (CandidateId("d"), P(20, 50)),
    ]
    assert wrap_line(pts).candidates == [CandidateId("b")]


def _random_points(rnd, n):
    return [
        (CandidateId(f"c{i}"), P(float(rnd.randint(1, 12)), float(rnd.randint(0, 12))))
        for i in range(n)
    ]


def test_matches_brute_force_64():
    rnd = random.Random(7)
    pts = _random_points(rnd, 64)
    assert list(wrap_line(pts).points) == brute_force_front(pts)


point_lists = st.lists(
    st.tuples(st.integers(1, 15), st.integers(0, 15)), min_size=1, max_size=30
).map(lambda xs: [(CandidateId(f"c{i:02d}"), P(float(t), float(a))) for i, (t, a) in enumerate(xs)])


@given(point_lists)
def test_frontier_properties(pts):
    front = wrap_line(pts)
    fp = [p for _, p in front.points]
    assert all(a.time_ms < b.time_ms and a.accuracy < b.accuracy for a, b in zip(fp, fp[1:]))
    for c, p in pts:
        assert any(q == p for q in fp) or any(dominates(q, p) for q in fp)
    assert wrap_line(front.points) == front


@given(point_lists)
def test_frontier_invariant_under_monotone_transforms(pts):
    base = wrap_line(pts).candidates
    warped = [(c, P(math.exp(p.time_ms / 5), p.accuracy**3 + 1)) for c, p in pts]
    assert wrap_line(warped).candidates == base
