"""Command-line surface: formats, determinism and every exit code."""
import json
import re
import subprocess
import sys

import numpy as np
import pytest

from kwidth import ArrangementInconsistent, ParamCurve3, save_curve
from kwidth import cli
from kwidth.bounds import BoundReport
from kwidth.generators import GeneratorSpec, generate

from test_genericity import _stadium


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    root = tmp_path_factory.mktemp("curves")
    out = {}
    for name, spec in {
        "trefoil": GeneratorSpec("torus_2braid", {"q": 3}),
        "circle": GeneratorSpec("circle"),
        "hopf": GeneratorSpec("hopf"),
        "spiral": GeneratorSpec("spiral_closed"),
        "degenerate": GeneratorSpec("multi_circle", {"radii": [1.0, 1.0 + 1e-12]}),
    }.items():
        out[name] = root / f"{name}.json"
        save_curve(generate(spec), out[name])
    xy = _stadium().components[0].xy
    out["stadium"] = root / "stadium.json"
    save_curve(ParamCurve3([np.column_stack([xy, np.zeros(len(xy))])], "stadium"),
               out["stadium"])
    out["root"] = root
    return out


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_generate_writes_curve_json(tmp_path, capsys):
    path = tmp_path / "t.json"
    code, _, _ = run(capsys, "generate", "--kind", "torus_2braid", "--q", "5", "--out", path)
    doc = json.loads(path.read_text())
    assert code == 0 and doc["format_version"] == 1
    assert doc["name"] == "torus(2,5)"
    assert doc["components"][0]["analytic"]["word"] == "s1 s1 s1 s1 s1"
    code, out, _ = run(capsys, "generate", "--kind", "braid_word", "--word", "s1 S2 s1 S2",
                       "--strands", "3", "--epsilon", "0.04")
    assert code == 0 and json.loads(out)["components"][0]["analytic"]["epsilon"] == 0.04


def test_generate_rejects_bad_word(capsys):
    code, _, err = run(capsys, "generate", "--kind", "braid_word", "--word", "s9", "--strands", "3")
    assert code == cli.EXIT_INPUT and "s9" in err


def test_analyze_trefoil(files, capsys):
    code, out, _ = run(capsys, "analyze", "--input", files["trefoil"])
    doc = json.loads(out)
    assert code == 0
    assert doc["format_version"] == 1
    assert doc["w2"] == 10 and doc["fb_residual"] == 0
    assert doc["features"]["c"] == 3 and doc["graphic"]["r"] == 5
    assert doc["all_hold"] and all(b["holds"] for b in doc["bounds"])


def test_analyze_circle_all_bounds_hold(files, capsys):
    code, out, _ = run(capsys, "analyze", "--input", files["circle"])
    doc = json.loads(out)
    assert code == 0 and doc["w2"] == 2 and doc["all_hold"]


def test_analyze_output_is_byte_identical(files, tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "analyze", "--input", files["trefoil"], "--out", a)
    run(capsys, "analyze", "--input", files["trefoil"], "--out", b)
    assert a.read_bytes() == b.read_bytes()
    # floats carry 17 significant digits
    assert re.search(rb"\d\.\d{16}", a.read_bytes())


def test_exit_1_when_a_bound_fails(files, capsys, monkeypatch):
    real = cli.all_bounds

    def with_failure(*args):
        return real(*args) + [BoundReport("forced", 1.0, 2.0, ">=", False, -1.0, "test")]

    monkeypatch.setattr(cli, "all_bounds", with_failure)
    code, out, _ = run(capsys, "analyze", "--input", files["circle"])
    assert code == cli.EXIT_BOUND and json.loads(out)["all_hold"] is False


def test_exit_2_on_degenerate_input(files, capsys):
    code, out, err = run(capsys, "analyze", "--input", files["degenerate"])
    assert code == cli.EXIT_GENERIC
    assert "--perturb-seed" in err
    payload = json.loads(out)
    assert payload["genericity"]["ok"] is False
    assert payload["genericity"]["near_triple_tangency_found"] is True


def test_perturb_seed_repairs(files, capsys):
    code, _, _ = run(capsys, "analyze", "--input", files["stadium"])
    assert code == cli.EXIT_GENERIC
    code, out, _ = run(capsys, "analyze", "--input", files["stadium"], "--perturb-seed", "1")
    doc = json.loads(out)
    assert code == 0 and doc["perturbation"] == {"attempt": 1, "seed": 1}
    assert doc["fb_residual"] == 0


def test_exit_3_on_arrangement_failure(files, capsys, monkeypatch):
    def broken(pc, *a, **k):
        raise ArrangementInconsistent("forced")

    monkeypatch.setattr(cli, "width2", broken)
    code, _, err = run(capsys, "analyze", "--input", files["circle"])
    assert code == cli.EXIT_ARRANGEMENT and "forced" in err


def test_exit_4_on_low_confidence(files, capsys):
    code, _, err = run(capsys, "oracle", "--input", files["spiral"], "--resolution", "64x64")
    assert code == cli.EXIT_CONFIDENCE and "TANGENT" in err


@pytest.mark.parametrize("argv", [
    ["analyze", "--input", "/nonexistent.json"],
    ["analyze"],
    ["oracle", "--input", "CIRCLE", "--resolution", "32x32"],
    ["analyze", "--input", "CIRCLE", "--angle-min", "0"],
    ["verify"],
])
def test_exit_5_on_bad_input(files, capsys, argv):
    argv = [str(files["circle"]) if a == "CIRCLE" else a for a in argv]
    code, _, _ = run(capsys, *argv)
    assert code == cli.EXIT_INPUT


def test_oracle_trefoil(files, tmp_path, capsys):
    heat = tmp_path / "t.pgm"
    code, out, _ = run(capsys, "oracle", "--input", files["trefoil"], "--heatmap", heat)
    doc = json.loads(out)
    assert code == 0 and doc["agreement"] and doc["oracle"]["estimate"] == 10
    assert heat.read_bytes().startswith(b"P5\n1024 1024\n")


def test_oracle_circle_at_256(files, capsys):
    code, out, _ = run(capsys, "oracle", "--input", files["circle"], "--resolution", "256x256")
    assert code == 0 and json.loads(out)["oracle"]["estimate"] == 2


def _labels(svg):
    return sorted(int(w) for w in re.findall(r'class="face-label"[^>]*data-width="(\d+)"', svg))


@pytest.mark.parametrize("name, widths", [
    ("trefoil", [0, 2, 2, 2, 4]),
    ("circle", [0, 2]),
])
def test_graphic_svg_labels(files, tmp_path, capsys, name, widths):
    svg_path, json_path = tmp_path / f"{name}.svg", tmp_path / f"{name}.json"
    code, _, _ = run(capsys, "graphic-svg", "--input", files[name], "--out", svg_path,
                     "--json", json_path)
    svg = svg_path.read_text()
    assert code == 0 and _labels(svg) == widths
    assert 'class="fundamental-rectangle"' in svg and 'class="seam"' in svg
    doc = json.loads(json_path.read_text())
    assert sorted(f["width"] for f in doc["faces"]) == widths
    for e in doc["edges"]:
        assert 0 <= e["start"] < len(doc["vertices"]) and 0 <= e["end"] < len(doc["vertices"])


def test_graphic_svg_hopf(files, tmp_path, capsys):
    path = tmp_path / "h.svg"
    assert run(capsys, "graphic-svg", "--input", files["hopf"], "--out", path)[0] == 0
    svg = path.read_text()
    assert sum(_labels(svg)) == 8
    assert svg.count('class="vertex"') == 2


def test_verify_table(files, capsys):
    code, out, _ = run(capsys, "verify", "--input", files["trefoil"])
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0].split() == ["curve", "bound", "lhs", "rhs", "verdict", "slack"]
    crossing = next(line for line in lines if "crossing_chain" in line)
    assert crossing.split()[-2:] == ["holds", "2"]


def test_threads_env_fallback(files, capsys, monkeypatch):
    monkeypatch.setenv("KWIDTH_THREADS", "2")
    code, out, _ = run(capsys, "oracle", "--input", files["circle"], "--resolution", "128x128")
    assert code == 0


def test_console_script_runs(files):
    proc = subprocess.run([sys.executable, "-m", "kwidth.cli", "analyze", "--input",
                           str(files["circle"])], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["w2"] == 2
