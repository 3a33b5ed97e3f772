"""``kwidth`` command line: generate | analyze | graphic-svg | oracle | verify.

Exit codes
  0  success (for analyze and verify: every bound holds and the
     Fabricius-Bjerre residual is zero)
  1  a bound failed or the residual is nonzero
  2  the curve is not generic enough; rerun with --perturb-seed K
  3  the arrangement could not be built consistently
  4  the grid oracle could not certify enough cells
  5  unreadable input or bad arguments
"""
from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

from . import jsonio
from .bounds import all_bounds, example3_width
from .curve import Tolerances, load_curve, project_xy, save_curve
from .errors import (ArrangementInconsistent, InvalidCurve, KWidthError, LowConfidence,
                     NearTripleTangency, NonTransverseCrossing, ParseError, PerturbationFailed,
                     WidthMismatch)
from .features import fabricius_bjerre_check
from .generators import KINDS, GeneratorSpec, corpus, generate
from .genericity import check_generic, perturb_to_generic
from .graphic import width2
from .oracle import grid_width2
from .render import graphic_svg, graphic_to_json

FORMAT_VERSION = 1

EXIT_OK, EXIT_BOUND, EXIT_GENERIC, EXIT_ARRANGEMENT, EXIT_CONFIDENCE, EXIT_INPUT = range(6)


class CliError(Exception):
    def __init__(self, code: int, message: str, payload: dict | None = None):
        super().__init__(message)
        self.code = code
        self.payload = payload


@dataclass
class RunConfig:
    tolerances: Tolerances
    resolution: tuple
    seed: int | None
    threads: int | None
    out: str | None

    @classmethod
    def from_args(cls, ns) -> "RunConfig":
        try:
            tol = Tolerances(ns.angle_min, ns.line_space_min)
        except ValueError as exc:
            raise CliError(EXIT_INPUT, str(exc)) from None
        res = ns.resolution
        if min(res) < 64:
            raise CliError(EXIT_INPUT, "resolution must be at least 64 in each direction")
        return cls(tol, res, ns.perturb_seed, ns.threads, getattr(ns, "out", None))


def _resolution(text: str) -> tuple:
    try:
        a, b = text.lower().split("x")
        return int(a), int(b)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected NxN, got {text!r}") from None


def _emit(doc: dict, out: str | None) -> None:
    text = jsonio.dumps({"format_version": FORMAT_VERSION, **doc})
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


def _load(path):
    try:
        return load_curve(path)
    except (OSError, ValueError, KeyError, TypeError, InvalidCurve) as exc:
        raise CliError(EXIT_INPUT, f"cannot read curve from {path}: {exc}") from None


def _generic_plane(curve, cfg: RunConfig):
    """Unit-diameter projection, repaired with the seeded deformation if asked."""
    pc, _, _ = project_xy(curve).normalized()
    if cfg.seed is not None:
        try:
            pc = perturb_to_generic(pc, seed=cfg.seed, tol=cfg.tolerances)
        except PerturbationFailed as exc:
            raise CliError(EXIT_GENERIC, str(exc)) from None
        return pc
    report = check_generic(pc, cfg.tolerances)
    if not report.ok:
        raise CliError(EXIT_GENERIC,
                       "curve is not generic; rerun with --perturb-seed K to repair it",
                       {"genericity": report.to_json()})
    return pc


def _width(pc):
    try:
        return width2(pc)
    except (ArrangementInconsistent, WidthMismatch) as exc:
        raise CliError(EXIT_ARRANGEMENT, f"arrangement failed: {exc}") from None


def _features(pc, cfg):
    try:
        return fabricius_bjerre_check(pc, cfg.tolerances)
    except (NonTransverseCrossing, NearTripleTangency) as exc:
        raise CliError(EXIT_GENERIC,
                       f"{exc}; rerun with --perturb-seed K to repair it") from None


def analysis(curve, cfg: RunConfig) -> tuple:
    """``(document, all_ok)`` for one curve."""
    pc = _generic_plane(curve, cfg)
    fr = _features(pc, cfg)
    wr = _width(pc)
    bounds = all_bounds(curve, pc, fr, wr)
    g = wr.graphic
    ok = fr.fb_residual == 0 and all(b.holds for b in bounds)
    doc = {
        "name": curve.name,
        "perturbation": pc.meta.get("perturbation"),
        "features": fr.to_json(),
        "fb_residual": int(fr.fb_residual) if fr.fb_residual.denominator == 1
        else float(fr.fb_residual),
        "w2": wr.w2,
        "face_widths": sorted(wr.face_widths),
        "refinements": wr.refinements,
        "graphic": {"v": g.v, "e": g.e, "f": g.f, "r": g.r, "checks": dict(g.checks),
                    "topologies": sorted(fc.topology for fc in g.faces)},
        "example3_width": example3_width(pc),
        "bounds": [b.to_json() for b in bounds],
        "all_hold": ok,
    }
    return doc, ok, pc, wr


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_generate(ns) -> int:
    params = {}
    for key in ("q", "word", "strands", "epsilon", "seed", "petals", "turns", "n"):
        val = getattr(ns, key, None)
        if val is not None:
            params[key] = val
    try:
        curve = generate(GeneratorSpec(ns.kind, params))
    except (ParseError, ValueError) as exc:
        raise CliError(EXIT_INPUT, str(exc)) from None
    if ns.out:
        save_curve(curve, ns.out)
    else:
        from .curve import curve_to_json

        sys.stdout.write(jsonio.dumps(curve_to_json(curve)))
    return EXIT_OK


def cmd_analyze(ns) -> int:
    cfg = RunConfig.from_args(ns)
    doc, ok, _, _ = analysis(_load(ns.input), cfg)
    _emit(doc, cfg.out)
    return EXIT_OK if ok else EXIT_BOUND


def cmd_graphic_svg(ns) -> int:
    cfg = RunConfig.from_args(ns)
    curve = _load(ns.input)
    pc = _generic_plane(curve, cfg)
    wr = _width(pc)
    svg = graphic_svg(pc, wr, title=f"{curve.name}: w2 = {wr.w2}")
    with open(ns.out, "w") as fh:
        fh.write(svg)
    if ns.json:
        with open(ns.json, "w") as fh:
            fh.write(jsonio.dumps({"format_version": FORMAT_VERSION,
                                   **graphic_to_json(wr.graphic, wr)}))
    return EXIT_OK


def cmd_oracle(ns) -> int:
    cfg = RunConfig.from_args(ns)
    curve = _load(ns.input)
    pc = _generic_plane(curve, cfg)
    try:
        est, scan = grid_width2(pc, cfg.resolution, threads=cfg.threads)
    except LowConfidence as exc:
        raise CliError(EXIT_CONFIDENCE, str(exc)) from None
    wr = _width(pc)
    if ns.heatmap:
        scan.write_pgm(ns.heatmap)
    _emit({"name": curve.name, "oracle": scan.summary(), "w2": wr.w2,
           "agreement": est == wr.w2}, cfg.out)
    return EXIT_OK if est == wr.w2 else EXIT_BOUND


def _verify_rows(name, doc) -> list:
    rows = [(name, "fb_residual", str(doc["fb_residual"]), "0",
             "holds" if doc["fb_residual"] == 0 else "FAILS", "")]
    for b in doc["bounds"]:
        verdict = "n/a" if not b["applicable"] else ("holds" if b["holds"] else "FAILS")
        rows.append((name, b["name"], f"{b['lhs']:.6g}", f"{b['relation']} {b['rhs']:.6g}",
                     verdict, f"{b['slack']:.6g}"))
    return rows


def cmd_verify(ns) -> int:
    cfg = RunConfig.from_args(ns)
    if ns.corpus:
        curves = [(name, generate(spec)) for name, spec in corpus().items()]
    elif ns.input:
        curves = [(None, _load(ns.input))]
    else:
        raise CliError(EXIT_INPUT, "verify needs --input or --corpus")
    rows, docs, all_ok = [], [], True
    for name, curve in curves:
        doc, ok, _, _ = analysis(curve, cfg)
        all_ok &= ok
        docs.append(doc)
        rows += _verify_rows(name or curve.name, doc)
    header = ("curve", "bound", "lhs", "rhs", "verdict", "slack")
    widths = [max(len(r[k]) for r in rows + [header]) for k in range(len(header))]
    for r in [header] + rows:
        print("  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip())
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(jsonio.dumps({"format_version": FORMAT_VERSION, "curves": docs,
                                   "all_hold": all_ok}))
    return EXIT_OK if all_ok else EXIT_BOUND


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _common(p, out_help="write the JSON document here instead of stdout"):
    p.add_argument("--input", help="curve JSON file")
    p.add_argument("--out", help=out_help)
    p.add_argument("--resolution", type=_resolution, default=(1024, 1024), metavar="NxN")
    p.add_argument("--perturb-seed", type=int, default=None, metavar="K",
                   help="repair a non-generic curve with the seeded deformation K")
    p.add_argument("--angle-min", type=float, default=1e-4)
    p.add_argument("--line-space-min", type=float, default=1e-6)
    p.add_argument("--threads", type=int, default=None,
                   help="worker cap (default: $KWIDTH_THREADS, else all cores)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="kwidth", description="2-width of closed curves")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated curve as JSON")
    p.add_argument("--kind", required=True, choices=KINDS)
    p.add_argument("--q", type=int)
    p.add_argument("--word")
    p.add_argument("--strands", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--petals", type=int)
    p.add_argument("--turns", type=float)
    p.add_argument("--n", type=int, help="bridge number for bridge_embedding")
    p.add_argument("--out")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="features, graphic, width and bounds as one JSON document")
    _common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("graphic-svg", help="render the projection and the graphic")
    _common(p, out_help="SVG output path")
    p.add_argument("--json", help="also write the graphic as JSON here")
    p.set_defaults(func=cmd_graphic_svg)

    p = sub.add_parser("oracle", help="brute-force grid estimate of the 2-width")
    _common(p)
    p.add_argument("--heatmap", help="PGM heatmap output path")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", help="table of every bound with its verdict and slack")
    _common(p)
    p.add_argument("--corpus", action="store_true", help="run over the built-in corpus")
    p.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    if ns.command in ("analyze", "oracle") and not ns.input:
        print(f"kwidth {ns.command}: --input is required", file=sys.stderr)
        return EXIT_INPUT
    if ns.command == "graphic-svg" and not (ns.input and ns.out):
        print("kwidth graphic-svg: --input and --out are required", file=sys.stderr)
        return EXIT_INPUT
    try:
        return ns.func(ns)
    except CliError as exc:
        print(f"kwidth {ns.command}: {exc}", file=sys.stderr)
        if exc.payload is not None:
            sys.stdout.write(jsonio.dumps({"format_version": FORMAT_VERSION,
                                           "error": str(exc), **exc.payload}))
        return exc.code
    except KWidthError as exc:
        print(f"kwidth {ns.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_ARRANGEMENT


if __name__ == "__main__":
    sys.exit(main())
