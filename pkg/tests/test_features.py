"""Feature extraction against curves whose features are known by hand."""
import math
from fractions import Fraction

import numpy as np
import pytest

from kwidth import NonTransverseCrossing, plane_curve, project_xy
from kwidth.curve import param_grid
from kwidth.features import (fabricius_bjerre_check, find_bitangents, find_crossings,
                             find_inflections, total_curvature)
from kwidth.generators import GeneratorSpec, generate


def _plane(kind, **params):
    pc, _, _ = project_xy(generate(GeneratorSpec(kind, params))).normalized()
    return pc


def test_circle_has_no_features():
    fr = fabricius_bjerre_check(_plane("circle"))
    assert (fr.c, fr.i, fr.t, fr.s) == (0, 0, 0, 0)
    assert fr.total_curvature == pytest.approx(2 * math.pi)


def test_figure_eight_by_hand():
    # (sin 2u, sin u): x' y'' - y' x'' = sin u (4 cos^2 u + 2), zero at u = 0, pi only
    pc = _plane("figure_eight")
    infl = sorted(p.param[1] for p in find_inflections(pc))
    assert infl == pytest.approx([0.0, math.pi], abs=1e-9)
    cr = find_crossings(pc)
    assert len(cr) == 1 and cr[0].exterior
    assert np.allclose(cr[0].point, 0.0, atol=1e-6)
    # the two branches through the origin have slopes +-1/2 in the unnormalised chart
    assert cr[0].angle == pytest.approx(2 * math.atan(0.5), rel=1e-3)


def test_two_disjoint_circles_have_two_of_each_bitangent():
    u = param_grid(400)
    a = np.stack([np.cos(u) - 1.5, np.sin(u)], axis=1)
    b = np.stack([0.7 * np.cos(u) + 1.5, 0.7 * np.sin(u) + 0.2], axis=1)
    pc = plane_curve([a, b])
    bits = find_bitangents(pc)
    assert sorted(b.interior for b in bits) == [False, False, True, True]
    assert find_crossings(pc) == []


def test_bitangent_lines_touch_both_circles():
    u = param_grid(400)
    a = np.stack([np.cos(u) - 1.5, np.sin(u)], axis=1)
    b = np.stack([np.cos(u) + 1.5, np.sin(u)], axis=1)
    pc = plane_curve([a, b])
    for bt in find_bitangents(pc):
        n = bt.line.normal
        for centre in ((-1.5, 0.0), (1.5, 0.0)):
            assert abs(abs(np.dot(centre, n) - bt.line.d) - 1.0) < 1e-3
    # equal circles: exterior bitangents are y = +-1
    ext = sorted(abs(b.line.d) for b in find_bitangents(pc) if not b.interior)
    assert ext == pytest.approx([1.0, 1.0], abs=1e-3)


def test_trefoil_braid_positively_curved():
    fr = fabricius_bjerre_check(_plane("torus_2braid", q=3))
    assert (fr.c, fr.i, fr.t, fr.s) == (3, 0, 3, 0)
    assert all(c.exterior for c in fr.crossings)
    # winding number 2 and no inflections: total curvature 4 pi
    assert fr.total_curvature == pytest.approx(4 * math.pi, rel=1e-6)


def test_fb_residual_is_exact_fraction():
    fr = fabricius_bjerre_check(_plane("figure_eight"))
    assert fr.fb_residual == Fraction(0)
    assert fr.to_json()["fb_residual"] == {"numerator": 0, "denominator": 1}


def test_total_curvature_of_ellipse_is_two_pi():
    u = param_grid(2000)
    pc = plane_curve([np.stack([3 * np.cos(u), np.sin(u)], axis=1)])
    assert total_curvature(pc) == pytest.approx(2 * math.pi, rel=1e-4)


def _rectangle(half_w, half_h, per_side=25):
    t = (np.arange(per_side) + 0.37) / per_side
    sides = [np.stack([-half_w + 2 * half_w * t, np.full_like(t, -half_h)], axis=1),
             np.stack([np.full_like(t, half_w), -half_h + 2 * half_h * t], axis=1),
             np.stack([half_w - 2 * half_w * t, np.full_like(t, half_h)], axis=1),
             np.stack([np.full_like(t, -half_w), half_h - 2 * half_h * t], axis=1)]
    return np.concatenate(sides)


def test_shallow_crossing_is_rejected():
    a = _rectangle(1.0, 0.1)
    alpha = 1e-5
    rot = np.array([[math.cos(alpha), -math.sin(alpha)], [math.sin(alpha), math.cos(alpha)]])
    b = (a - (0.0, 0.1)) @ rot.T + (0.013, 0.1)
    pc = plane_curve([a, b])
    with pytest.raises(NonTransverseCrossing):
        find_crossings(pc)
    from kwidth import Tolerances

    loose = find_crossings(pc, Tolerances(angle_min=1e-7))
    assert min(c.angle for c in loose) == pytest.approx(alpha, rel=1e-3)
