"""Shared fixtures: the corpus is analysed once per session."""
from __future__ import annotations

from dataclasses import dataclass

import pytest

from kwidth import project_xy, width2
from kwidth.features import fabricius_bjerre_check
from kwidth.generators import GeneratorSpec, corpus, generate


@dataclass
class Analysed:
    curve: object
    pc: object
    fr: object
    wr: object


def analyse(spec: GeneratorSpec) -> Analysed:
    curve = generate(spec)
    pc, _, _ = project_xy(curve).normalized()
    return Analysed(curve, pc, fabricius_bjerre_check(pc), width2(pc))


@pytest.fixture(scope="session")
def corpus_results() -> dict:
    return {name: analyse(spec) for name, spec in corpus().items()}


@pytest.fixture(scope="session")
def trefoil(corpus_results) -> Analysed:
    return corpus_results["torus_2_3"]


@pytest.fixture(scope="session")
def circle(corpus_results) -> Analysed:
    return corpus_results["circle"]


# ---------------------------------------------------------------------------
# one verdict line per acceptance criterion
# ---------------------------------------------------------------------------

_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion number n")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            n, title = mark.args
            _CRITERIA.setdefault(n, {"title": title, "outcomes": []})
            item.user_properties.append(("criterion", n))


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    for key, n in report.user_properties:
        if key == "criterion":
            _CRITERIA[n]["outcomes"].append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        entry = _CRITERIA[n]
        outs = entry["outcomes"]
        if not outs:
            verdict = "NOT RUN"
        elif all(o == "passed" for _, o in outs):
            verdict = "PASS"
        else:
            verdict = "FAIL"
        failed = [name for name, o in outs if o != "passed"]
        extra = f" (failing: {', '.join(failed)})" if failed and verdict == "FAIL" else ""
        tr.write_line(f"criterion {n:2d} {verdict}: {entry['title']}{extra}")
