import json

import numpy as np
import pytest

from kwidth import LowConfidence, project_xy
from kwidth.generators import GeneratorSpec, generate
from kwidth.oracle import TANGENT, _label, grid_width2


def _plane(kind, **params):
    return project_xy(generate(GeneratorSpec(kind, params)))


def test_circle_at_256():
    est, scan = grid_width2(_plane("circle"), (256, 256))
    assert est == 2
    assert scan.width_multiset() == [0, 2]
    assert scan.rounds_used == 0 and scan.confidence > 0.95


def test_trefoil_at_1024(trefoil):
    est, scan = grid_width2(trefoil.pc)
    assert est == 10
    assert scan.width_multiset() == sorted(trefoil.wr.face_widths)


def test_seam_gluing_joins_reflected_columns():
    counts = np.zeros((4, 6), np.int32)
    counts[:, 3] = TANGENT          # a wall splitting every column in two
    counts[1:3, :] = TANGENT        # and the middle columns blocked entirely
    labels, n = _label(counts)
    # without gluing: four pieces (two rows of column 0, two of column 3)
    # with (0, d) ~ (pi, -d): row j of the first column meets row 5 - j of the last
    assert n == 2
    assert labels[0, 0] == labels[3, 5] and labels[0, 4] == labels[3, 2]
    assert labels[0, 0] != labels[0, 4]


def test_seam_gluing_respects_counts():
    counts = np.array([[0, 0, 2, 2], [2, 2, 0, 0]], np.int32)
    labels, n = _label(counts)
    # reflected rows carry matching counts, so the two columns glue into two regions
    assert n == 2


def test_low_confidence_when_walls_dominate():
    with pytest.raises(LowConfidence):
        grid_width2(_plane("spiral_closed"), (64, 64))


def test_thread_count_does_not_change_the_scan():
    pc = _plane("rose", petals=4)
    _, a = grid_width2(pc, (256, 256), threads=1)
    _, b = grid_width2(pc, (256, 256), threads=4)
    assert np.array_equal(a.counts, b.counts)
    assert a.to_json() == b.to_json()


def test_backends_agree():
    pc = _plane("figure_eight")
    _, a = grid_width2(pc, (256, 256), backend="numpy")
    _, b = grid_width2(pc, (256, 256), backend="numba")
    assert np.array_equal(a.counts, b.counts)


def test_exports(tmp_path):
    # the Hopf link's thin faces need the default resolution
    _, scan = grid_width2(_plane("hopf"))
    doc = json.loads(scan.to_json())
    assert doc["estimate"] == 8
    assert sum(r["width"] for r in doc["regions"]) == 8
    path = tmp_path / "h.pgm"
    scan.write_pgm(path)
    raw = path.read_bytes()
    header = b"P5\n1024 1024\n255\n"
    assert raw.startswith(header) and len(raw) == len(header) + 1024 * 1024


def test_bad_resolution():
    with pytest.raises(ValueError):
        grid_width2(_plane("circle"), (1, 64))
