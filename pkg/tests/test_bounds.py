import math

import pytest

from kwidth import FlagViolation
from kwidth.bounds import (C_CURV, all_bounds, check_braid_upper_bound, check_crossing_bound,
                           check_curvature_bound, check_line_lower_bound,
                           check_positive_arc_bound, check_projection_curvature, example3_width,
                           is_positively_curved_braid)


def test_crossing_bound_trefoil(trefoil):
    rep = check_crossing_bound(trefoil.fr, trefoil.wr)
    assert rep.holds and rep.slack == 2
    chain = rep.details["chain"]
    assert (chain["w2"], chain["r"], chain["f"], chain["v"], chain["c"]) == (10, 5, 3, 3, 3)
    assert rep.details["chain_holds"]


def test_crossing_bound_circle(circle):
    rep = check_crossing_bound(circle.fr, circle.wr)
    assert rep.holds and rep.lhs == 1 and rep.rhs == 0


def test_crossing_bound_two_seven(corpus_results):
    res = corpus_results["torus_2_7"]
    rep = check_crossing_bound(res.fr, res.wr)
    assert (res.fr.c, res.wr.w2) == (7, 18) and rep.holds


def test_line_lower_bound(circle, trefoil, corpus_results):
    rep = check_line_lower_bound(circle.pc, circle.wr)
    assert rep.details["n"] == 1 and rep.holds and rep.slack == 0
    rep = check_line_lower_bound(trefoil.pc, trefoil.wr)
    assert rep.details["max_count"] == 4 and (rep.lhs, rep.rhs) == (10, 6) and rep.holds
    # a line through six points forces w2 >= 12, met with equality here
    sp = corpus_results["spiral4pi"]
    rep = check_line_lower_bound(sp.pc, sp.wr)
    assert rep.details["max_count"] == 6 and rep.rhs == 12 and rep.holds and rep.slack == 0


def test_braid_upper_bound(trefoil, corpus_results):
    rep = check_braid_upper_bound(trefoil.fr, trefoil.wr, True)
    assert (rep.lhs, rep.rhs) == (10, 20) and rep.holds
    assert is_positively_curved_braid(trefoil.curve)
    fig = corpus_results["figure_eight"]
    assert not is_positively_curved_braid(fig.curve)
    na = check_braid_upper_bound(fig.fr, fig.wr, False)
    assert not na.applicable
    with pytest.raises(FlagViolation):
        check_braid_upper_bound(fig.fr, fig.wr, True)


def test_curvature_bound(circle, trefoil):
    rep = check_curvature_bound(circle.fr, circle.wr)
    assert rep.rhs == pytest.approx(1.0) and rep.holds
    rep = check_curvature_bound(trefoil.fr, trefoil.wr)
    assert rep.rhs == pytest.approx(2 ** (2 / 3), rel=1e-6) and rep.holds
    assert C_CURV == pytest.approx((2 * math.pi) ** (-2 / 3))


def test_positive_arc_bound_on_the_spiral(corpus_results):
    sp = corpus_results["spiral4pi"]
    rep = check_positive_arc_bound(sp.pc, sp.wr)
    assert rep.details["x"] >= 4 * math.pi
    assert rep.rhs >= 4 and rep.holds
    # strict bound above 4 plus even parity
    assert sp.wr.w2 >= 6


def test_projection_curvature(circle, trefoil):
    rep = check_projection_curvature(trefoil.curve, trefoil.wr, trefoil.pc)
    assert rep.rhs == pytest.approx(2 * math.pi * 10 ** 1.5) and rep.holds
    rep = check_projection_curvature(circle.curve, circle.wr, circle.pc)
    assert rep.rhs == pytest.approx(17.77, abs=0.01)
    assert rep.lhs == pytest.approx(2 * math.pi)


def test_example3(circle, trefoil, corpus_results):
    assert example3_width(circle.pc) == 0
    assert example3_width(corpus_results["figure_eight"].pc) == 1
    assert example3_width(trefoil.pc) == 3


def test_all_bounds_serialise(trefoil):
    reps = all_bounds(trefoil.curve, trefoil.pc, trefoil.fr, trefoil.wr)
    names = [r.name for r in reps]
    assert names == ["crossing_chain", "line_lower_bound", "braid_upper_bound",
                     "curvature_bound", "positive_arc_bound", "projection_curvature"]
    for r in reps:
        doc = r.to_json()
        assert set(doc) >= {"name", "lhs", "rhs", "holds", "slack", "provenance"}
