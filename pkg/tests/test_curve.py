import json
import math

import numpy as np
import pytest

from kwidth import (DegenerateHeights, InvalidCurve, ParamCurve3, Tolerances, load_curve,
                    plane_curve, project_xy, save_curve, width1)
from kwidth.curve import curve_from_json, curve_to_json, param_grid, similarity
from kwidth.generators import GeneratorSpec, generate


def _ring(n=64, z=None):
    u = param_grid(n)
    zz = np.zeros(n) if z is None else z(u)
    return np.stack([np.cos(u), np.sin(u), zz], axis=1)


def test_tolerances_must_be_positive():
    with pytest.raises(ValueError):
        Tolerances(angle_min=0.0)
    with pytest.raises(ValueError):
        Tolerances(line_space_min=-1.0)


@pytest.mark.parametrize("pts, why", [
    (np.zeros((8, 3)), "too few samples"),
    (np.full((32, 3), np.nan), "NaN"),
    (np.zeros((32, 2)), "wrong shape"),
])
def test_invalid_curves_rejected(pts, why):
    with pytest.raises(InvalidCurve):
        ParamCurve3([pts])


def test_repeated_sample_rejected():
    pts = _ring()
    pts[5] = pts[4]
    with pytest.raises(InvalidCurve):
        ParamCurve3([pts])


def test_width1_tilted_circle_is_two():
    assert width1(ParamCurve3([_ring(z=lambda u: 0.5 * np.cos(u))])) == 2


def test_width1_counts_gaps_by_hand():
    # z = cos 2u has two maxima and two minima at tied heights; the low harmonics separate them
    pts = _ring(256, z=lambda u: np.cos(2 * u) + 0.1 * np.cos(u) + 0.05 * np.sin(u))
    # critical heights: two minima then two maxima, gaps meet the curve 2, 4, 2 times
    assert width1(ParamCurve3([pts])) == 8


def test_width1_planar_curve_is_degenerate():
    with pytest.raises(DegenerateHeights):
        width1(ParamCurve3([_ring()]))


def test_width1_tied_critical_heights():
    with pytest.raises(DegenerateHeights):
        width1(ParamCurve3([_ring(256, z=lambda u: np.cos(2 * u))]))


def test_project_xy_keeps_analytic_derivatives():
    pc = project_xy(generate(GeneratorSpec("circle", {"radius": 2.0})))
    comp = pc.components[0]
    assert np.allclose(comp.speed, 2.0)
    assert np.allclose(comp.curvature, 0.5)


def test_finite_difference_curvature_of_circle():
    pc = plane_curve([_ring(512)[:, :2]])
    assert np.allclose(pc.components[0].curvature, 1.0, atol=1e-4)


def test_normalized_has_unit_diameter():
    pc = project_xy(generate(GeneratorSpec("rose", {"petals": 5})))
    npc, center, scale = pc.normalized()
    assert npc.diameter() == pytest.approx(1.0)
    c, _ = npc.center_radius()
    assert np.allclose(c, 0.0, atol=1e-12)


def test_similarity_scales_curvature():
    pc = project_xy(generate(GeneratorSpec("circle")))
    big = similarity(pc, 0.7, 3.0, (1.0, -2.0))
    assert np.allclose(big.components[0].curvature, 1.0 / 3.0)


def test_json_round_trip(tmp_path):
    curve = generate(GeneratorSpec("torus_2braid", {"q": 3}))
    path = tmp_path / "c.json"
    save_curve(curve, path)
    back = load_curve(path)
    assert np.array_equal(back.components[0].points, curve.components[0].points)
    assert back.components[0].descriptor == curve.components[0].descriptor
    # the analytic handle is rebuilt from the descriptor
    assert back.components[0].analytic is not None
    assert json.loads(path.read_text())["format_version"] == 1


def test_json_rejects_nan(tmp_path):
    doc = curve_to_json(ParamCurve3([_ring(z=lambda u: np.cos(u))]))
    text = json.dumps(doc).replace("1.0", "NaN", 1)
    path = tmp_path / "bad.json"
    path.write_text(text)
    with pytest.raises(InvalidCurve):
        load_curve(path)
    with pytest.raises(InvalidCurve):
        curve_from_json({"name": "x"})


def test_refined_doubles_samples_on_the_curve():
    pc = project_xy(generate(GeneratorSpec("circle")))
    r = pc.refined(2)
    assert r.components[0].n == 2 * pc.components[0].n
    assert np.allclose(np.hypot(*r.components[0].xy.T), 1.0)
    assert math.isclose(r.diameter(), 2.0, rel_tol=1e-9)
