import pytest

from kbpmc import samples
from kbpmc.formula import Knows, Not, Or, Possible, TRUE
from kbpmc.kernel import (
    AccessRelation, BasisMismatchError, MustCanStructure, Partition, Relation, StateBasis,
    TransitionStructure, UnreachableStateError, bottom, compute_reachability, kripke_sat,
    mask_of, mc_leq, mc_sat, mc_sat_posneg, reachable_mask, states_of,
)


def test_mask_round_trip():
    assert mask_of([0, 3, 5]) == 0b101001
    assert states_of(0b101001) == {0, 3, 5}
    assert states_of(0) == frozenset()


def test_relation_basics():
    r = Relation.from_pairs(3, [(0, 1), (1, 2), (2, 2)])
    assert len(r) == 3
    assert (0, 1) in r and (1, 0) not in r
    assert r.post(0b001) == 0b010
    assert r.pre(0b100) == 0b110
    assert r.edges() == [(0, 1), (1, 2), (2, 2)]
    assert r.restrict_sources(0b001) == Relation.from_pairs(3, [(0, 1)])
    assert Relation.empty(3) <= r <= Relation.full(3)
    assert (r | Relation.identity(3)) - r == Relation.from_pairs(3, [(0, 0), (1, 1)])
    assert r & Relation.identity(3) == Relation.from_pairs(3, [(2, 2)])
    assert hash(r) == hash(Relation.from_pairs(3, [(2, 2), (1, 2), (0, 1)]))


def test_partition_from_labels():
    p = Partition(["x", "y", "x"])
    assert p.image(0) == 0b101
    assert p.contains(0, 2) and not p.contains(0, 1)
    assert p.is_equivalence()
    assert p.pre(0b010) == 0b010
    assert set(p.pairs()) == {(0, 0), (0, 2), (2, 0), (2, 2), (1, 1)}


def test_explicit_accessibility_may_be_any_relation():
    rel = AccessRelation(Relation.from_pairs(2, [(0, 1)]))
    assert not rel.is_equivalence()
    with pytest.warns(UserWarning):
        StateBasis.build([set(), set()], [0], accessibility={"a": [(0, 1)]})
    with pytest.raises(ValueError):
        StateBasis.build([set(), set()], [0], accessibility={"a": [(0, 1)]}, strict=True)


def test_basis_build_with_observability():
    b = samples.bit_transmission_basis()
    assert b.n == 8
    assert b.names[5] == "z5"
    assert b.initial_states == {0, 4}
    assert b.agents == ("S", "R")
    s_acc = b.accessibility("S")
    # S observes sbit and ack: z0 and z1 look the same, z0 and z4 do not
    assert s_acc.contains(0, 1) and not s_acc.contains(0, 4)
    assert b.atom("sbit").mask == mask_of([4, 5, 6, 7])
    assert b.state_index("z3") == 3


def test_basis_validation():
    with pytest.raises(ValueError):
        StateBasis.build([set()], [1])
    with pytest.raises(ValueError):
        StateBasis.build([set()], [0], observability={"a": []}, accessibility={"a": [(0, 0)]})


def test_reachability_layers():
    b = samples.bit_transmission_basis()
    m = samples.bit_transmission_solution(b)
    info = compute_reachability(m)
    assert info.layers[0] == {0, 4}
    assert info.layers[1] == {0, 1, 4, 5}
    assert info.reachable == {0, 1, 3, 4, 5, 7}
    assert info.depth[7] == 2
    assert reachable_mask(b, m.relation) == info.reachable_mask


def test_kripke_knowledge_only_sees_reachable_states():
    b = samples.bit_transmission_basis()
    m = samples.bit_transmission_solution(b)
    kr = samples.receiver_knows_bit(b)
    assert not kripke_sat(m, 0, kr)
    assert kripke_sat(m, 1, kr)          # z2 is unreachable, so R is not confused by it
    assert kripke_sat(m, 3, Knows("S", kr))
    with pytest.raises(UnreachableStateError):
        kripke_sat(m, 2, TRUE)


def test_possibility_is_dual_of_knowledge_classically():
    b = samples.bit_transmission_basis()
    m = samples.bit_transmission_solution(b)
    p = b.atom("sbit")
    for s in (0, 1, 3, 4, 5, 7):
        assert kripke_sat(m, s, Possible("R", p)) == (not kripke_sat(m, s, Knows("R", Not(p))))


def test_must_can_structure_requires_inclusion():
    b = samples._two_bit_basis()
    lo = Relation.from_pairs(4, [(0, 1)])
    with pytest.raises(ValueError):
        MustCanStructure(b, lo, Relation.empty(4))
    y = bottom(b)
    assert y.lower == Relation.empty(4) and y.upper == Relation.full(4)
    y2 = MustCanStructure(b, lo, Relation.from_pairs(4, [(0, 1), (0, 2)]))
    assert mc_leq(y, y2) and not mc_leq(y2, y)


def test_constructive_satisfaction_reads_the_right_bound():
    b = samples._two_bit_basis()
    y = MustCanStructure(b, Relation.empty(4), Relation.from_pairs(4, [(0, 1)]))
    q2 = b.atom("q2")
    # K over the can-reachable states {s0, s1}: q2 fails at s0
    assert not mc_sat(y, 0, Knows("a", q2))
    assert mc_sat(y, 0, Knows("a", Or(q2, Not(q2))))
    # M over the must-reachable states {s0}: q2 is not yet possible
    assert not mc_sat(y, 0, Possible("a", q2))
    assert mc_sat(y, 0, Possible("a", Not(q2)))
    with pytest.raises(ValueError):
        mc_sat(y, 0, Not(Knows("a", q2)))
    pn = mc_sat_posneg(y, 0, Knows("a", Not(q2)))
    assert pn == type(pn)(False, False)      # neither established nor refuted
    with pytest.raises(UnreachableStateError):
        mc_sat(y, 3, TRUE)


def test_structures_on_different_bases_do_not_mix():
    from kbpmc.guarded import interpret
    gs = samples.choice_pair()
    other = StateBasis.build([set(), {"q2"}, {"q1"}, {"q1", "q2"}], initial=[1],
                             observability={"a": []})
    interpret(gs, TransitionStructure(samples._two_bit_basis(), Relation.empty(4)))
    with pytest.raises(BasisMismatchError):
        interpret(gs, TransitionStructure(other, Relation.empty(4)))


def test_transition_structures_compare_by_content():
    b = samples._two_bit_basis()
    m1 = b.structure([(0, 1)])
    m2 = b.structure([(0, 1)])
    assert m1 == m2 and hash(m1) == hash(m2)
    assert m1.transitions == {(0, 1)}
