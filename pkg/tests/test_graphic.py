"""Arrangement, faces and widths, checked against hand-computed cases."""
import math
from collections import Counter

import numpy as np
import pytest

from kwidth import LineCoord, TangentLine, dual_curve, line_intersections, plane_curve, project_xy
from kwidth.curve import param_grid
from kwidth.generators import GeneratorSpec, generate
from kwidth.graphic import mobius_coords, width2


def _plane(kind, **params):
    pc, _, _ = project_xy(generate(GeneratorSpec(kind, params))).normalized()
    return pc


def test_linecoord_identifies_antipodal_pairs():
    a = LineCoord(0.3 + math.pi, 0.25)
    assert a.theta == pytest.approx(0.3) and a.d == pytest.approx(-0.25)
    b = LineCoord(-0.1, 0.5)
    assert b.theta == pytest.approx(math.pi - 0.1) and b.d == pytest.approx(-0.5)
    # lines just either side of the seam are close in the band
    near = LineCoord(1e-6, 0.2).distance(LineCoord(math.pi - 1e-6, -0.2))
    assert near < 1e-5


def test_mobius_coords_vectorised():
    t, d = mobius_coords(np.array([0.5, 0.5 + math.pi, -0.5]), np.array([1.0, 1.0, 1.0]))
    assert np.allclose(t, [0.5, 0.5, math.pi - 0.5])
    assert np.allclose(d, [1.0, -1.0, -1.0])


def test_line_counts_on_the_unit_diameter_circle():
    pc = _plane("circle")
    assert line_intersections(pc, LineCoord(0.2, 0.0)) == 2
    assert line_intersections(pc, LineCoord(1.0, 0.3)) == 2
    assert line_intersections(pc, LineCoord(2.0, 0.6)) == 0
    with pytest.raises(TangentLine):
        line_intersections(pc, LineCoord(0.2, 0.5))


def test_line_counts_are_even_and_match_a_figure_eight_by_hand():
    pc = _plane("figure_eight")
    # the x-axis meets (sin 2u, sin u) where sin u = 0 transversally, and nowhere else
    assert line_intersections(pc, LineCoord(math.pi / 2, 0.0)) == 2
    # a vertical line x = 0.1 (normalised) meets both lobes twice each
    assert line_intersections(pc, LineCoord(0.0, 0.05)) == 4


def test_circle_dual_is_a_double_wrap():
    dc = dual_curve(_plane("circle"))
    s = dc.sheet(0)
    assert s.rot == 1 and len(s.folds) == 0
    assert np.allclose(s.d, 0.5)
    assert dc.wraps() == [2]


def test_circle_graphic():
    wr = width2(_plane("circle"))
    g = wr.graphic
    assert (g.v, g.e, g.f, g.r) == (0, 0, 0, 2)
    faces = sorted((f.width, f.topology) for f in g.faces)
    assert faces == [(0, "annulus"), (2, "mobius")]
    assert wr.w2 == 2


def test_trefoil_graphic(trefoil):
    g = trefoil.wr.graphic
    assert sorted(trefoil.wr.face_widths) == [0, 2, 2, 2, 4]
    assert (g.v, g.e, g.f, g.r) == (3, 6, 3, 5)
    assert Counter(f.topology for f in g.faces) == Counter(
        {"disk": 3, "annulus": 1, "mobius": 1})
    assert all(g.checks.values())


def test_two_five_braid_has_seven_regions(corpus_results):
    assert corpus_results["torus_2_5"].wr.graphic.r == 7


def test_unbounded_face_is_width_zero(corpus_results):
    for name, res in corpus_results.items():
        g = res.wr.graphic
        seed = g.faces[g.seed_face]
        assert seed.unbounded and seed.width == 0, name


def test_certificates_recount(corpus_results):
    for name, res in corpus_results.items():
        for face, line, count in res.wr.certificate:
            assert line_intersections(res.pc, line) == count == res.wr.face_widths[face], name


def test_adjacent_faces_differ_by_two(corpus_results):
    for name, res in corpus_results.items():
        w = res.wr.face_widths
        for lo, hi, delta in res.wr.graphic.adjacency:
            assert abs(delta) == 2 and w[hi] - w[lo] == delta, name


def test_nested_circles():
    u = param_grid(512)
    outer = np.stack([np.cos(u), np.sin(u)], axis=1)
    inner = np.stack([0.4 * np.cos(u) + 0.1, 0.4 * np.sin(u)], axis=1)
    wr = width2(plane_curve([outer, inner]))
    # lines missing both, meeting the outer only, meeting both: 0 + 2 + 4, each a
    # Moebius band or annulus; no bitangents, so no disks
    assert sorted(wr.face_widths) == [0, 2, 4]
    assert wr.graphic.v == 0
