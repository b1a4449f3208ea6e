import itertools
import math

import pytest

from amisel.sha import (
    CurveParams,
    EvaluationError,
    RungPlan,
    curve_evaluator,
    random_curves,
    run_sha,
    synthetic_curve,
)


def test_curve_examples():
    assert synthetic_curve(CurveParams(80, 0.2))(5) == pytest.approx(80 * (1 - math.exp(-1)))
    assert round(synthetic_curve(CurveParams(80, 0.2))(5), 2) == 50.57
    assert synthetic_curve(CurveParams(70, 50))(5) == pytest.approx(70)
    assert all(synthetic_curve(CurveParams(0, 1))(b) == 0 for b in (1, 5, 100))
    assert synthetic_curve(CurveParams(100, 5, offset=10))(10) == 100


@pytest.mark.parametrize("bad", [dict(asymptote=101, rate=1), dict(asymptote=50, rate=0), dict(asymptote=50, rate=1, offset=-1)])
def test_curve_params_validation(bad):
    with pytest.raises(ValueError):
        CurveParams(**bad)


def test_plan_validation_and_parse():
    assert RungPlan.parse("5:5,10:3,15:1") == RungPlan()
    for rungs in [(), ((5, 5), (5, 1)), ((5, 3), (10, 3), (15, 1)), ((5, 5), (10, 2))]:
        with pytest.raises(ValueError):
            RungPlan(rungs)


def test_populations_eight():
    curves = random_curves([f"b{i}" for i in range(8)], seed=1)
    res = run_sha(list(curves), curve_evaluator(curves))
    assert res.populations() == [8, 5, 3, 1]
    assert [e.budget for e in res.log] == [5] * 8 + [10] * 5 + [15] * 3


def test_too_few_candidates():
    with pytest.raises(ValueError):
        run_sha(["a", "b"], lambda c, b: 1.0)


def test_out_of_range_score_names_candidate_and_rung():
    def ev(c, b):
        if c == "x":
            return 120.0 if b == 10 else 90.0
        return 50.0

    with pytest.raises(EvaluationError, match=r"rung 2.*x"):
        run_sha(list("abcdxf"), ev)


def test_dominant_survives_exhaustive():
    # every pool of 5..8 of these curves plus the dominant one
    others = {f"o{i}": CurveParams(40 + 5 * i, 0.05 + 0.07 * i, i) for i in range(7)}
    top = CurveParams(99, 1.0, 0.5)
    for n in range(4, 8):
        for pool in itertools.combinations(sorted(others), n):
            for pos in range(n + 1):
                names = list(pool)
                names.insert(pos, "top")
                curves = {k: others[k] for k in pool} | {"top": top}
                assert run_sha(names, curve_evaluator(curves)).survivor == "top"


def test_crossing_curves_trace():
    # X leads at 5 epochs but saturates low; Y starts slow and wins at 15
    curves = {
        "X": CurveParams(60, 1.0),
        "Y": CurveParams(95, 0.1),
        "A": CurveParams(70, 0.15),
        "B": CurveParams(65, 0.2),
        "C": CurveParams(62, 0.3),
        "D": CurveParams(40, 0.5),
    }
    res = run_sha(list(curves), curve_evaluator(curves))
    # hand trace:
    #  5 ep: X 59.60, C 48.17, B 41.09, Y 37.38, A 36.93, D 36.72 -> D out
    # 10 ep: Y 60.05, X 60.00, C 58.91, B 56.20, A 54.38 -> B, A out
    # 15 ep: Y 73.80, C 61.31, X 60.00 -> Y
    rungs = {r: {e.candidate for e in res.log if e.rung == r and e.kept} for r in (1, 2, 3)}
    assert rungs[1] == {"X", "C", "B", "Y", "A"}
    assert rungs[2] == {"Y", "X", "C"}
    assert res.survivor == "Y"


def test_ties_broken_by_name_and_replayable():
    res = run_sha(list("hgfedcba"), lambda c, b: 50.0)
    assert res.survivor == "a"
    assert res == run_sha(list("hgfedcba"), lambda c, b: 50.0)
    assert [e.candidate for e in res.log[:8]] == list("hgfedcba")
