"""Shared fixtures and the per-criterion acceptance summary."""
from __future__ import annotations

from pathlib import Path

import pytest

CORPUS = Path(__file__).resolve().parent.parent / "src" / "kbpmc" / "corpus"

CRITERIA = {
    1: "bit transmission decided, reachable states, three check verdicts",
    2: "cyclic variable setting: bounds, iteration semantics, two solutions",
    3: "variable setting with default: decided table and iteration semantics",
    4: "missed choice and self-fulfilling guard: unresolved, solution sets",
    5: "lower-bound rescue: fallback solution and bounds",
    6: "unexpected exam: witness act2, act2, act1 and failing EF written",
    7: "rule systems R0, R3, R5: coherence, closure table, solutions",
    8: "memory models: reorder and inlining pairs",
    9: "randomized property suites",
    10: "witness and synchrony analyses",
}

_items: dict = {}
_outcomes: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): test backs acceptance criterion n")


@pytest.fixture
def corpus():
    return CORPUS


def pytest_collection_modifyitems(session, config, items):
    # the acceptance module re-exports the property suites; run each only once
    defining = {(getattr(i, "obj", None), i.name) for i in items
                if getattr(getattr(i, "obj", None), "__module__", None) == i.module.__name__}
    keep = [i for i in items
            if getattr(getattr(i, "obj", None), "__module__", i.module.__name__) == i.module.__name__
            or (i.obj, i.name) not in defining]
    if len(keep) != len(items):
        dropped = [i for i in items if i not in keep]
        config.hook.pytest_deselected(items=dropped)
        items[:] = keep
    for item in items:
        for m in item.iter_markers("criterion"):
            _items.setdefault(item.nodeid, set()).add(m.args[0])


def pytest_runtest_logreport(report):
    crits = _items.get(report.nodeid)
    if not crits:
        return
    if report.when == "call" or report.outcome != "passed":
        ok = report.passed and not hasattr(report, "wasxfail")
        if report.when != "call" and report.skipped and not hasattr(report, "wasxfail"):
            ok = False
        for c in crits:
            _outcomes.setdefault(c, []).append((report.nodeid, ok))


def pytest_terminal_summary(terminalreporter):
    if not _items:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n, text in CRITERIA.items():
        results = _outcomes.get(n)
        if not results:
            tr.write_line(f"criterion {n:2d}: NOT RUN  {text}")
            continue
        bad = [nid for nid, ok in results if not ok]
        verdict = "PASS" if not bad else "FAIL"
        tr.write_line(f"criterion {n:2d}: {verdict}  {text} ({len(results) - len(bad)}/{len(results)} tests)")
        for nid in bad:
            tr.write_line(f"    not met: {nid}")
