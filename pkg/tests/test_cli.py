import io
import json
import os
import subprocess
import sys
import time
from pathlib import Path

import jsonschema
import pytest

from kbpmc.cli import main
from kbpmc.export import read_json, schema
from kbpmc.guarded import classify
from kbpmc.lang import load

GOLDEN = Path(__file__).parent / "golden"
SPECS = sorted(p.name for p in (Path(__file__).parents[1] / "src" / "kbpmc" / "corpus").glob("*.tm"))


def cli(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


# -- check ------------------------------------------------------------------------------

@pytest.mark.parametrize("name", SPECS)
def test_check_report_matches_golden(corpus, name):
    t0 = time.perf_counter()
    code, text = cli("check", "--witness", corpus / name)
    assert time.perf_counter() - t0 < 5
    text = f"exit {code}\n" + text
    path = GOLDEN / (name[:-3] + ".txt")
    if os.environ.get("KBPMC_UPDATE_GOLDEN"):
        path.write_text(text)
    assert text == path.read_text()


@pytest.mark.parametrize("name, code", [
    ("bit_transmission.tm", 1), ("mm_inline_left.tm", 0), ("vs.tm", 2), ("nc.tm", 2),
    ("may.tm", 2), ("nd.tm", 1), ("mm_reorder_left.tm", 2),
])
def test_exit_codes(corpus, name, code):
    assert cli("check", corpus / name)[0] == code


def test_reports_are_deterministic(corpus):
    first = cli("check", "--witness", corpus / "unexpected_exam.tm")
    assert all(cli("check", "--witness", corpus / "unexpected_exam.tm") == first for _ in range(3))


def test_bounds_verdicts(corpus, tmp_path):
    spec = tmp_path / "vs_checks.tm"
    spec.write_text((corpus / "vs.tm").read_text()
                    + "check reachable q2;\ncheck reachable q1 & q2;\n")
    code, text = cli("check", "--bounds", spec)
    assert code == 2
    assert text.splitlines()[-3:] == [
        "BOUND initial true PASS", "BOUND reachable q2 UNKNOWN", "BOUND reachable q1 & q2 FAIL"]
    code, text = cli("check", "--bounds", corpus / "mm_reorder_left.tm")
    assert text.splitlines()[-1] == "BOUND reachable r1 = 1 & r2 = 1 UNKNOWN"
    # a decided model is checked as usual
    code, text = cli("check", "--bounds", corpus / "mm_reorder_right.tm")
    assert text.splitlines()[-1] == "CHECK reachable r1 = 1 & r2 = 1 FAIL"


def test_iteration_and_liberal_modes(corpus):
    code, text = cli("check", "--mode", "iteration", "--witness", corpus / "mm_reorder_left.tm")
    assert code == 0 and "CHECK reachable" in text and "PASS" in text
    assert "ITERATION eta=3 alpha=3 status=fixed_point" in text
    code, text = cli("check", "--liberal", corpus / "mm_reorder_left.tm")
    assert "LIBERAL edges=55 solution=no" in text


def test_no_fallback(corpus):
    code, text = cli("check", "--no-fallback", corpus / "nd.tm")
    assert code == 2 and text.startswith("MODEL Unresolved")


def test_dump_writes_the_report_as_json(corpus, tmp_path):
    dump = tmp_path / "r.json"
    code, text = cli("check", "--dump", dump, corpus / "bit_transmission.tm")
    doc = json.loads(dump.read_text())
    assert doc["tag"] == "Decided"
    assert [c["verdict"] for c in doc["checks"]] == ["PASS", "PASS", "FAIL"]


def test_timing_lines(corpus):
    _, text = cli("check", "--timing", corpus / "vs.tm")
    assert any(line.startswith("TIMING") for line in text.splitlines())


@pytest.mark.parametrize("argv, fragment", [
    (["check", "missing.tm"], "missing.tm"),
    (["check", "--max-states", "4", "{corpus}/bit_transmission.tm"], "exceeds the cap"),
    (["check", "--max-edges", "2", "{corpus}/bit_transmission.tm"], "edges"),
    (["rules", "{corpus}/vs.tm"], "line"),
])
def test_input_errors_exit_3(corpus, capsys, argv, fragment):
    argv = [a.format(corpus=corpus) for a in argv]
    code, _ = cli(*argv)
    assert code == 3
    err = capsys.readouterr().err
    assert err.startswith("error:") and fragment in err


def test_spec_errors_are_reported_with_locations(tmp_path, capsys):
    bad = tmp_path / "bad.tm"
    bad.write_text("var x : boolean;\ncheck initial y;\n")
    assert cli("check", bad)[0] == 3
    assert "2:15" in capsys.readouterr().err


# -- export --------------------------------------------------------------------------------

@pytest.mark.parametrize("name, extra", [
    ("bit_transmission.tm", []), ("vsb.tm", []), ("nd.tm", []),
    ("vs.tm", ["--bounds"]), ("mm_reorder_left.tm", ["--bounds"]), ("nc.tm", ["--liberal"]),
])
def test_json_export_validates_and_round_trips(corpus, name, extra):
    code, text = cli("export", *extra, corpus / name)
    assert code == 0
    doc = json.loads(text)
    jsonschema.validate(doc, schema())
    em = load((corpus / name).read_text())
    assert doc["meta"]["spec_hash"] == em.source_hash
    if doc["kind"] == "structure":
        m, ids = read_json(doc)
        assert len(ids) == len(doc["states"])
        assert len(m.relation) == len(doc["edges"])
        # every exported edge is an edge of the solved model between the named states
        c = classify(em.system)
        if c.solved and "--liberal" not in extra:
            idx = {s["id"]: em.basis.state_index(s["name"]) for s in doc["states"]}
            assert {(idx[e["from"]], idx[e["to"]]) for e in doc["edges"]} == set(c.solution.relation.pairs())
    else:
        assert {e["from"] for e in doc["edges_mu"]} <= {s["id"] for s in doc["states"]}


def test_export_refuses_unresolved_without_bounds(corpus, capsys):
    assert cli("export", corpus / "vs.tm")[0] == 2
    assert "--bounds" in capsys.readouterr().err


def test_export_to_file(corpus, tmp_path):
    out = tmp_path / "m.json"
    code, text = cli("export", "-o", out, corpus / "bit_transmission.tm")
    assert code == 0 and text == ""
    jsonschema.validate(json.loads(out.read_text()), schema())


def test_dot_marks_can_only_edges_dashed(corpus):
    _, text = cli("export", "--format", "dot", "--bounds", corpus / "nd.tm")
    assert text.startswith("digraph")
    assert text.count("style=dashed") == 1
    _, text = cli("export", "--format", "dot", corpus / "vsb.tm")
    assert "dashed" not in text
    assert "peripheries=2" in text


def test_dot_accessibility_edges(corpus):
    _, plain = cli("export", "--format", "dot", corpus / "bit_transmission.tm")
    _, acc = cli("export", "--format", "dot", "--acc", corpus / "bit_transmission.tm")
    assert "dotted" not in plain and "style=dotted" in acc


def test_dot_without_actions_shows_isolated_initial_states(tmp_path):
    spec = tmp_path / "idle.tm"
    spec.write_text("var b : boolean;\n")
    code, text = cli("export", "--format", "dot", spec)
    assert code == 0
    assert text.count("peripheries=2") == 2 and "->" not in text


# -- solutions and rules ------------------------------------------------------------------------

def test_solutions_subcommand(corpus):
    code, text = cli("solutions", corpus / "vs.tm")
    assert code == 0
    lines = text.splitlines()
    assert lines[0] == "SOLUTIONS 2"
    assert len(lines) == 3 and all(ln.startswith("SOLUTION ") for ln in lines[1:])
    assert cli("solutions", "--jobs", "2", corpus / "vs.tm")[1] == text
    assert cli("solutions", "--cap", "1", corpus / "vsb.tm")[0] == 3


@pytest.mark.parametrize("name, code, lines", [
    ("r0.rules", 2, ["no coherent solution"]),
    ("r3.rules", 0, ["LEAST none"]),
    ("r5.rules", 0, ["LEAST {x1} (unique)"]),
])
def test_rules_enumeration(corpus, name, code, lines):
    got_code, text = cli("rules", "--enumerate", corpus / name)
    assert got_code == code
    for ln in lines:
        assert ln in text
    assert text.startswith("UNIVERSE ")


def test_rules_lfp_line(corpus):
    _, text = cli("rules", corpus / "r5.rules")
    assert "LFP must={} can={x1, x2, x3} undecided" in text


def test_rules_explain(corpus):
    code, text = cli("rules", "--explain", "x1", "--given", "x1", corpus / "r3.rules")
    assert code == 0
    assert text.splitlines()[-3:] == ["EXPLAIN x1 given {x1}", "x1   by x1 <- ; ! x3", "NEGATIVE {x3}"]
    code, text = cli("rules", "--explain", "x1", "--given", "x3", corpus / "r3.rules")
    assert text.splitlines()[-1] == "EXPLAIN x1 given {x3}: not derivable"


def test_module_entry_point(corpus):
    proc = subprocess.run([sys.executable, "-m", "kbpmc", "check", str(corpus / "vsb.tm")],
                          capture_output=True, text=True)
    assert proc.returncode == 1 and proc.stdout.startswith("MODEL Decided")
