from kbpmc.formula import (
    AG, ER, EU, EX, FALSE, TRUE, And, Atom, Iff, Implies, Knows, Not, Or, Possible, Temporal,
    agents_of, conj, disj, is_nnf, is_propositional, is_temporal_free, knowledge_subformulas,
    nnf, show, subformulas,
)

p = Atom.of("p", [0])
q = Atom.of("q", [1])


def test_nnf_pushes_negation_through_connectives_and_modalities():
    assert nnf(Not(And(p, q))) == Or(Not(p), Not(q))
    assert nnf(Not(Implies(p, q))) == And(p, Not(q))
    assert nnf(Not(Knows("a", p))) == Possible("a", Not(p))
    assert nnf(Not(Possible("a", Not(p)))) == Knows("a", p)
    assert nnf(Not(Not(p))) == p
    assert nnf(Not(TRUE)) == FALSE


def test_nnf_uses_temporal_dualities():
    assert nnf(Not(EX(p))) == Temporal("AX", (Not(p),))
    assert nnf(Not(AG(p))) == Temporal("EF", (Not(p),))
    assert nnf(Not(EU(p, q))) == Temporal("AR", (Not(p), Not(q)))
    assert nnf(Not(ER(p, q))) == Temporal("AU", (Not(p), Not(q)))


def test_nnf_output_is_in_normal_form():
    f = Iff(Knows("a", Implies(p, q)), Not(Possible("b", Iff(p, q))))
    assert not is_nnf(f)
    assert is_nnf(nnf(f))


def test_structural_queries():
    f = And(Knows("a", p), AG(Possible("b", q)))
    assert not is_temporal_free(f)
    assert not is_propositional(Knows("a", p))
    assert is_propositional(Or(p, Not(q)))
    assert agents_of(f) == {"a", "b"}
    assert list(subformulas(And(p, q))) == [p, q, And(p, q)]
    assert knowledge_subformulas(f) == [Knows("a", p), Knows("b", Not(q))]


def test_conj_and_disj_nest_to_the_left():
    assert conj() == TRUE and disj() == FALSE
    assert conj(p, q, p) == And(And(p, q), p)
    assert disj(p, q, p) == Or(Or(p, q), p)


def test_show():
    assert show(And(Or(p, q), Not(p))) == "(p | q) & !p"
    assert show(Implies(p, Implies(q, p))) == "p -> (q -> p)"
    assert show(Knows("a", And(p, q))) == "K[a] (p & q)"
    assert show(EU(p, q)) == "E[p U q]"
    assert show(p & ~q) == "p & !q"
