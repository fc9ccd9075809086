"""Small programs whose guards talk about their own outcome.

Each system is solved three ways: the constructive must/can fixed point, the
plain iteration of the interpretation, and brute-force enumeration of every
solution.  The cases show a clean decision, a program with two equally good
answers, one the constructive method cannot settle, and one rescued by
reinterpreting the must bound.
"""
from kbpmc import samples
from kbpmc.guarded import classify, enumerate_solutions, iteration_semantics, lfp_constructive


def edges(rel_or_model, names):
    rel = getattr(rel_or_model, "relation", rel_or_model)
    return "{" + ", ".join(f"{names[s]}->{names[t]}" for s, t in rel.pairs()) + "}"


CASES = [
    ("two blind choices excluding each other", samples.choice_pair),
    ("the same with an unconditional default", samples.choice_with_default),
    ("a choice the constructive bounds miss", samples.choice_missed),
    ("a move that justifies itself", samples.self_fulfilling),
    ("a move rescued by the must bound", samples.lower_bound_rescue),
]

for title, build in CASES:
    gs = build()
    names = gs.basis.names
    y = lfp_constructive(gs).fixpoint
    c = classify(gs)
    it = iteration_semantics(gs)
    sols = enumerate_solutions(gs)
    print(f"== {title}")
    print(f"   must {edges(y.lower, names)}  can {edges(y.upper, names)}  -> {c.tag}")
    if c.solved:
        print(f"   solution {edges(c.solution, names)}")
    print(f"   iteration stops ({it.status}) at {edges(it.semantics, names)}")
    print(f"   all solutions: {', '.join(edges(m, names) for m in sols) or 'none'}")
    print()
