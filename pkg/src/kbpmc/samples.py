"""Small hand-built guarded systems used in tests, demos and documentation.

Each builder returns a fresh :class:`GuardedSystem`.  State names follow the
usual naming of these examples (``z0..z7``, ``s0..s3``, ``u0, u1``).
"""
from __future__ import annotations

from .formula import And, Knows, Not, Or, Possible, TRUE
from .guarded import GuardedAction, GuardedSystem
from .kernel import Relation, StateBasis, TransitionStructure

# labels of the eight-state bit transmission basis
_BT_LABELS = [
    set(), {"snt"}, {"ack"}, {"snt", "ack"},
    {"sbit"}, {"sbit", "rbit", "snt"}, {"sbit", "ack"}, {"sbit", "rbit", "snt", "ack"},
]


def bit_transmission_basis() -> StateBasis:
    return StateBasis.build(
        _BT_LABELS, initial=[0, 4],
        observability={"S": ["sbit", "ack"], "R": ["rbit", "snt"]},
        names=[f"z{i}" for i in range(8)],
        propositions=["sbit", "rbit", "snt", "ack"],
    )


def receiver_knows_bit(basis: StateBasis):
    sbit = basis.atom("sbit")
    return Or(Knows("R", Not(sbit)), Knows("R", sbit))


def bit_transmission() -> GuardedSystem:
    """Sender resends until it knows the receiver has the bit; receiver acks likewise."""
    basis = bit_transmission_basis()
    kr = receiver_knows_bit(basis)
    ident = [(i, i) for i in range(8)]
    send = Relation.from_pairs(8, ident + [(0, 1), (2, 3), (4, 5), (6, 7)])
    ack = Relation.from_pairs(8, ident + [(0, 2), (1, 3), (4, 6), (5, 7)])
    return GuardedSystem(basis, [
        GuardedAction("send", Not(Knows("S", kr)), send),
        GuardedAction("ack", And(kr, Not(Knows("R", Knows("S", kr)))), ack),
    ])


def bit_transmission_solution(basis: StateBasis = None) -> TransitionStructure:
    basis = basis or bit_transmission_basis()
    loops = [(i, i) for i in (0, 1, 3, 4, 5, 7)]
    return basis.structure(loops + [(0, 1), (1, 3), (4, 5), (5, 7)])


def _two_bit_basis() -> StateBasis:
    # s0 = (¬q1,¬q2), s1 = (¬q1,q2), s2 = (q1,¬q2), s3 = (q1,q2); one blind agent
    return StateBasis.build(
        [set(), {"q2"}, {"q1"}, {"q1", "q2"}], initial=[0],
        observability={"a": []}, names=["s0", "s1", "s2", "s3"],
        propositions=["q1", "q2"],
    )


def _not_at(basis, q1: bool, q2: bool):
    a, b = basis.atom("q1"), basis.atom("q2")
    return Not(And(a if q1 else Not(a), b if q2 else Not(b)))


def choice_pair() -> GuardedSystem:
    """Two moves from s0, each allowed only if the agent knows the other target is unreachable."""
    basis = _two_bit_basis()
    return GuardedSystem(basis, [
        GuardedAction("to_s1", Knows("a", _not_at(basis, True, False)), basis.relation([(0, 1)])),
        GuardedAction("to_s2", Knows("a", _not_at(basis, False, True)), basis.relation([(0, 2)])),
    ])


def choice_with_default() -> GuardedSystem:
    """An unconditional move to s2 breaks the symmetry of :func:`choice_pair`."""
    basis = _two_bit_basis()
    return GuardedSystem(basis, [
        GuardedAction("to_s1", Knows("a", _not_at(basis, True, False)), basis.relation([(0, 1)])),
        GuardedAction("to_s2", TRUE, basis.relation([(0, 2)])),
        GuardedAction("to_s3", Knows("a", _not_at(basis, False, True)), basis.relation([(0, 3)])),
    ])


def choice_missed() -> GuardedSystem:
    """A unique solution that the constructive semantics cannot find."""
    basis = _two_bit_basis()
    q2 = basis.atom("q2")
    return GuardedSystem(basis, [
        GuardedAction("to_s1", Knows("a", _not_at(basis, True, False)), basis.relation([(0, 1)])),
        GuardedAction("to_s2", Knows("a", _not_at(basis, False, True)), basis.relation([(0, 2)])),
        GuardedAction("to_s3", Knows("a", Not(q2)), basis.relation([(0, 3)])),
    ])


def self_fulfilling() -> GuardedSystem:
    """A move justified only by the possibility it creates itself."""
    basis = StateBasis.build([set(), {"p"}], initial=[0], observability={"a": []},
                             names=["u0", "u1"], propositions=["p"])
    return GuardedSystem(basis, [
        GuardedAction("go", Possible("a", basis.atom("p")), basis.relation([(0, 1)])),
    ])


def lower_bound_rescue() -> GuardedSystem:
    """Undecided constructively, yet the must bound reinterprets to a solution."""
    basis = StateBasis.build([{"p"}, {"p", "q"}], initial=[0],
                             observability={"a": ["q"], "b": []},
                             names=["u0", "u1"], propositions=["p", "q"])
    guard = Knows("b", Possible("a", basis.atom("p")))
    return GuardedSystem(basis, [GuardedAction("go", guard, basis.relation([(0, 1)]))])
