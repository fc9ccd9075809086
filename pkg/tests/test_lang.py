import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from kbpmc.formula import Knows, TRUE
from kbpmc.lang import (
    LexError, ParseError, SpecError, evaluate_in_state, expand_expr, load, parse, parse_expr,
    show_expr, show_spec, tokenize, typecheck,
)
from kbpmc.lang.ast import (
    BinOp, BoolLit, BoolType, CtlUnary, CtlUntil, IntLit, Modal, Name, NotE, Quant, RangeType,
)

CASES = settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])


# -- lexer --------------------------------------------------------------------------

def test_tokens_and_locations():
    toks = tokenize("var x : 0..3; -- note\nx := x+1 <-> !b")
    assert [t.text for t in toks[:7]] == ["var", "x", ":", "0", "..", "3", ";"]
    assert toks[0].kind == "kw" and toks[1].kind == "ident"
    assign = toks[7:10]
    assert [t.text for t in assign] == ["x", ":=", "x"] and assign[0].loc == (2, 1)
    assert [t.text for t in toks[10:]] == ["+", "1", "<->", "!", "b", ""]
    assert toks[-1].kind == "eof"


def test_lex_error_location():
    with pytest.raises(LexError) as e:
        tokenize("var x\n  : @")
    assert (e.value.line, e.value.col) == (2, 5)


# -- parser -------------------------------------------------------------------------

@pytest.mark.parametrize("text, line, col, fragment", [
    ("var x boolean;", 1, 7, "expected ':'"),
    ("var x : boolean;\naction a do x := ;", 2, 18, "expected an expression"),
    ("check always x;", 1, 7, "'initial' or 'reachable'"),
    ("var x : 0..3;\ncheck initial x = 1 = 2;", 2, 21, "do not chain"),
    ("agent a = { x y };", 1, 15, "'}' or ','"),
    ("x := 1;", 1, 1, "expected a declaration"),
])
def test_parse_errors_point_at_the_offending_token(text, line, col, fragment):
    with pytest.raises(ParseError) as e:
        parse(text)
    assert (e.value.line, e.value.col) == (line, col)
    assert fragment in str(e.value)


def test_operator_binding():
    p, q, r = Name("p"), Name("q"), Name("r")
    assert parse_expr("p | q & r") == BinOp("|", p, BinOp("&", q, r))
    assert parse_expr("p -> q -> r") == BinOp("->", p, BinOp("->", q, r))
    assert parse_expr("p <-> q <-> r") == BinOp("<->", BinOp("<->", p, q), r)
    assert parse_expr("!p & q") == BinOp("&", NotE(p), q)
    assert parse_expr("p and not q or r") == BinOp("|", BinOp("&", p, NotE(q)), r)
    assert parse_expr("x + 1 = y - 2") == BinOp("=", BinOp("+", Name("x"), IntLit(1)),
                                                 BinOp("-", Name("y"), IntLit(2)))
    assert parse_expr("EX p & q") == BinOp("&", CtlUnary("EX", p), q)
    assert parse_expr("A[p U q | r]") == CtlUntil("A", p, BinOp("|", q, r))


def test_modal_and_quantifier_operands_extend_to_the_right():
    p, q = Name("p"), Name("q")
    assert parse_expr("K[a] p & q") == Modal("K", "a", BinOp("&", p, q))
    assert parse_expr("q & M[b] p | q") == BinOp("&", q, Modal("M", "b", BinOp("|", p, q)))
    assert parse_expr("(K[a] p) & q") == BinOp("&", Modal("K", "a", p), q)
    assert parse_expr("exists v:0..2 . v = 1 & p") == Quant(
        "exists", "v", RangeType(0, 2), BinOp("&", BinOp("=", Name("v"), IntLit(1)), p))


# -- printer round trip ---------------------------------------------------------------

NAMES = st.sampled_from(["p", "q", "x", "y1", "flag"])
AG_NAMES = st.sampled_from(["a", "b"])


def exprs():
    leaves = st.one_of(NAMES.map(Name), st.booleans().map(BoolLit), st.integers(0, 9).map(IntLit))
    ranges = st.tuples(st.integers(-2, 2), st.integers(0, 3)).map(lambda t: RangeType(t[0], t[0] + t[1]))

    def extend(c):
        return st.one_of(
            st.builds(NotE, c),
            st.builds(BinOp, st.sampled_from(["&", "|", "->", "<->", "=", "!=", "<", "<=",
                                              ">", ">=", "+", "-"]), c, c),
            st.builds(Modal, st.sampled_from(["K", "M"]), AG_NAMES, c),
            st.builds(CtlUnary, st.sampled_from(["EX", "EF", "EG", "AX", "AF", "AG"]), c),
            st.builds(CtlUntil, st.sampled_from(["E", "A"]), c, c),
            st.builds(Quant, st.sampled_from(["exists", "forall"]), st.sampled_from(["v", "w"]),
                      st.one_of(st.just(BoolType()), ranges), c),
        )

    return st.recursive(leaves, extend, max_leaves=12)


@CASES
@given(exprs())
def test_printed_expressions_parse_back_to_the_same_tree(e):
    assert parse_expr(show_expr(e)) == e


@pytest.mark.parametrize("name", [
    "bit_transmission.tm", "unexpected_exam.tm", "muddy_children.tm", "sum_and_product.tm",
    "mm_reorder_left.tm", "mm_inline_right.tm", "vsb.tm", "nd.tm",
])
def test_printed_corpus_specs_parse_back(corpus, name):
    spec = parse((corpus / name).read_text())
    assert parse(show_spec(spec)) == spec


# -- type checking ------------------------------------------------------------------------

def diag_messages(text):
    return [(d.line, d.message) for d in typecheck(parse(text))]


def test_clean_spec_has_no_diagnostics():
    assert diag_messages("var x : 0..2; var b : boolean;\nagent a = { x };\n"
                         "action go guard K[a] b do x := x + 1;\ncheck initial b;") == []


@pytest.mark.parametrize("text, line, fragment", [
    ("var x : 3..1;", 1, "empty range"),
    ("var x : boolean; var x : boolean;", 1, "declared twice"),
    ("var x : boolean;\nagent a = { y };", 2, "undeclared variable 'y'"),
    ("var x : boolean;\naction go guard K[c] x do ;", 2, "undeclared agent 'c'"),
    ("var x : 0..3;\naction go do x := true;", 2, "cannot assign a boolean"),
    ("var x : 0..3;\naction go do x := 7;", 2, "outside the range"),
    ("var x : 0..3;\naction go do x := 1, x := 2;", 2, "assigned twice"),
    ("var x : 0..3;\ncheck initial x + 1;", 2, "must be boolean"),
    ("var x : 0..3; var b : boolean;\ncheck initial x = b;", 2, "cannot compare"),
    ("var x : boolean;\nagent a = {};\ncheck reachable K[a] x;", 3, "state predicates only"),
    ("var x : boolean initial EF x;", 1, "initial clauses must be state predicates"),
    ("var x : boolean;\nlet p = q;\nlet q = p;", 3, "cyclic definitions"),
    ("var x : boolean;\ncheck initial exists x:boolean . x;", 2, "shadows"),
    ("var x : boolean;\ncheck initial zz;", 2, "undeclared name 'zz'"),
    ("agent a = {};", 1, "declares no variables"),
])
def test_diagnostics(text, line, fragment):
    got = diag_messages(text)
    assert any(ln == line and fragment in msg for ln, msg in got), got


def test_all_diagnostics_are_reported_together():
    with pytest.raises(SpecError) as e:
        load("var x : 0..1;\ncheck initial y;\ncheck initial z;")
    assert len(e.value.diagnostics) == 2


# -- elaboration ----------------------------------------------------------------------------

SMALL = """
var b : boolean initial !b;
var x : 0..2 initial x = 0;
agent a = { x };
agent c = {};
action inc guard x < 2 & K[a] !b do x := x + 1;
action flip do b := !b;
action wrap do x := x + 2;
check initial AG x <= 2;
check reachable b & x = 2;
"""


def test_state_order_and_names():
    m = load(SMALL)
    assert m.n_states == 6
    assert [m.basis.names[s] for s in (0, 1, 3, 5)] == [
        "b=false,x=0", "b=false,x=1", "b=true,x=0", "b=true,x=2"]
    assert m.state_index(b=True, x=1) == 4
    assert m.values(4) == {"b": True, "x": 1}
    assert m.basis.initial == 0b000001
    assert m.basis.agents == ("a", "c")
    assert m.basis.accessibility("a").image(0) == 0b001001
    assert m.basis.accessibility("c").image(0) == 0b111111


def test_guard_prefilter_and_out_of_range_transitions():
    m = load(SMALL)
    inc, flip, wrap = m.system.actions
    # the state-predicate conjunct of the guard restricts the sources
    assert set(inc.relation.pairs()) == {(0, 1), (1, 2), (3, 4), (4, 5)}
    assert isinstance(inc.guard.right, Knows)
    assert set(flip.relation.pairs()) == {(s, (s + 3) % 6) for s in range(6)}
    assert set(wrap.relation.pairs()) == {(0, 2), (3, 5)}
    assert any("wrap" in w and "4 source state(s)" in w for w in m.warnings)


def test_check_requests():
    m = load(SMALL)
    assert [(c.kind, c.name) for c in m.checks] == [("initial", "AG x <= 2"), ("reachable", "b & x = 2")]
    assert m.checks[1].formula == m.expand("b & x = 2")
    assert m.mask("b & x = 2") == 1 << m.state_index(b=True, x=2)


def test_state_cap():
    with pytest.raises(SpecError) as e:
        load("var x : 0..99; var y : 0..99;", max_states=1000)
    assert "exceeds the cap" in str(e.value)


def test_unsatisfiable_initial_clause_warns():
    m = load("var b : boolean initial b & !b;")
    assert m.basis.initial == 0
    assert any("no initial states" in w for w in m.warnings)


def test_unguarded_action_has_guard_true():
    m = load("var b : boolean; action f do b := true;")
    assert m.system.actions[0].guard == TRUE


def test_source_hash_is_stable():
    assert load(SMALL).source_hash == load(SMALL).source_hash
    assert load(SMALL).source_hash != load(SMALL + "\n").source_hash


# -- expansion versus direct evaluation ---------------------------------------------------------

EVAL_SPEC = load("""
var b : boolean;
var x : 0..3;
var y : -1..1;
let big = x >= 2;
let total_pos = x + y > 0;
""")


def int_exprs(bound):
    leaves = [Name("x"), Name("y"), *[IntLit(k) for k in range(4)], *[Name(v) for v in bound]]
    return st.recursive(st.sampled_from(leaves),
                        lambda c: st.builds(BinOp, st.sampled_from(["+", "-"]), c, c), max_leaves=3)


def bool_exprs(bound=(), depth=3):
    ints = int_exprs(bound)
    leaves = st.one_of(
        st.sampled_from([Name("b"), Name("big"), Name("total_pos"), BoolLit(True), BoolLit(False)]),
        st.builds(BinOp, st.sampled_from(["=", "!=", "<", "<=", ">", ">="]), ints, ints),
    )
    if depth == 0:
        return leaves
    sub = bool_exprs(bound, depth - 1)
    fresh = "v" if "v" not in bound else "w"
    quant = st.builds(Quant, st.sampled_from(["exists", "forall"]), st.just(fresh),
                      st.sampled_from([RangeType(0, 2), RangeType(-1, 1)]),
                      bool_exprs(bound + (fresh,), depth - 1)) if len(bound) < 2 else leaves
    return st.one_of(
        leaves,
        st.builds(NotE, sub),
        st.builds(BinOp, st.sampled_from(["&", "|", "->", "<->", "=", "!="]), sub, sub),
        quant,
    )


@CASES
@given(bool_exprs())
def test_expansion_agrees_with_direct_evaluation(e):
    f = expand_expr(e, EVAL_SPEC)
    mask = EVAL_SPEC.mask(e)
    for s in range(EVAL_SPEC.n_states):
        assert bool(mask >> s & 1) == evaluate_in_state(e, EVAL_SPEC, s), (show_expr(e), s)
    assert f is not None


def test_expansion_accepts_source_text():
    assert EVAL_SPEC.mask("x = 3 & b") == 1 << EVAL_SPEC.state_index(b=True, x=3, y=-1) | \
        1 << EVAL_SPEC.state_index(b=True, x=3, y=0) | 1 << EVAL_SPEC.state_index(b=True, x=3, y=1)
    assert evaluate_in_state("exists v:0..3 . v = x", EVAL_SPEC, 5) is True
