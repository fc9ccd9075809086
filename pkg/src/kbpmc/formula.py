"""Formula syntax for epistemic CTL (CTLK).

Atoms are extensional: each carries the bitmask of states where it holds
together with a display name.  All nodes are frozen dataclasses, so
structurally equal formulas compare and hash equal.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator

# temporal operators by arity
UNARY_TEMPORAL = ("EX", "AX", "EF", "AF", "EG", "AG")
BINARY_TEMPORAL = ("EU", "AU", "ER", "AR")

_TEMPORAL_DUAL = {
    "EX": "AX", "AX": "EX",
    "EF": "AG", "AG": "EF",
    "EG": "AF", "AF": "EG",
    "EU": "AR", "AR": "EU",
    "AU": "ER", "ER": "AU",
}


class Formula:
    """Base class of all formula nodes."""

    __slots__ = ()

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Not(self)

    def __str__(self) -> str:
        return show(self)


@dataclass(frozen=True, eq=True, repr=False)
class Atom(Formula):
    name: str
    mask: int

    @staticmethod
    def of(name: str, states: Iterable[int]) -> "Atom":
        m = 0
        for s in states:
            m |= 1 << s
        return Atom(name, m)

    def states(self) -> frozenset[int]:
        return frozenset(iter_bits(self.mask))

    def __repr__(self) -> str:
        return f"Atom({self.name!r})"


@dataclass(frozen=True, repr=False)
class Const(Formula):
    value: bool

    def __repr__(self) -> str:
        return "TRUE" if self.value else "FALSE"


TRUE = Const(True)
FALSE = Const(False)


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Iff(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Knows(Formula):
    agent: str
    sub: Formula


@dataclass(frozen=True)
class Possible(Formula):
    """The dual of knowledge: the agent considers ``sub`` possible."""
    agent: str
    sub: Formula


@dataclass(frozen=True)
class Temporal(Formula):
    op: str
    args: tuple

    def __post_init__(self):
        if self.op in UNARY_TEMPORAL:
            if len(self.args) != 1:
                raise ValueError(f"{self.op} takes one argument")
        elif self.op in BINARY_TEMPORAL:
            if len(self.args) != 2:
                raise ValueError(f"{self.op} takes two arguments")
        else:
            raise ValueError(f"unknown temporal operator {self.op!r}")


# -- constructors ----------------------------------------------------------

def EX(f): return Temporal("EX", (f,))
def AX(f): return Temporal("AX", (f,))
def EF(f): return Temporal("EF", (f,))
def AF(f): return Temporal("AF", (f,))
def EG(f): return Temporal("EG", (f,))
def AG(f): return Temporal("AG", (f,))
def EU(f, g): return Temporal("EU", (f, g))
def AU(f, g): return Temporal("AU", (f, g))
def ER(f, g): return Temporal("ER", (f, g))
def AR(f, g): return Temporal("AR", (f, g))


def conj(*fs: Formula) -> Formula:
    """Left-nested conjunction; the empty conjunction is TRUE."""
    if not fs:
        return TRUE
    out = fs[0]
    for f in fs[1:]:
        out = And(out, f)
    return out


def disj(*fs: Formula) -> Formula:
    if not fs:
        return FALSE
    out = fs[0]
    for f in fs[1:]:
        out = Or(out, f)
    return out


# -- structural queries ----------------------------------------------------

def children(f: Formula) -> tuple:
    if isinstance(f, (Not, Knows, Possible)):
        return (f.sub,)
    if isinstance(f, (And, Or, Implies, Iff)):
        return (f.left, f.right)
    if isinstance(f, Temporal):
        return f.args
    return ()


def subformulas(f: Formula) -> Iterator[Formula]:
    """All subformula occurrences, children before parents."""
    for c in children(f):
        yield from subformulas(c)
    yield f


def is_temporal_free(f: Formula) -> bool:
    return not any(isinstance(g, Temporal) for g in subformulas(f))


def is_epistemic_free(f: Formula) -> bool:
    return not any(isinstance(g, (Knows, Possible)) for g in subformulas(f))


def is_propositional(f: Formula) -> bool:
    return not any(isinstance(g, (Knows, Possible, Temporal)) for g in subformulas(f))


def is_nnf(f: Formula) -> bool:
    for g in subformulas(f):
        if isinstance(g, (Implies, Iff)):
            return False
        if isinstance(g, Not) and not isinstance(g.sub, Atom):
            return False
    return True


def agents_of(f: Formula) -> set[str]:
    return {g.agent for g in subformulas(f) if isinstance(g, (Knows, Possible))}


def knowledge_subformulas(f: Formula) -> list[Formula]:
    """Distinct K-subformulas in first-occurrence order.

    A possibility M_a g is included in its knowledge form K_a not g, since
    the two are interdefinable.
    """
    seen: dict = {}
    for g in subformulas(f):
        if isinstance(g, Knows):
            seen.setdefault(g, None)
        elif isinstance(g, Possible):
            seen.setdefault(Knows(g.agent, Not(g.sub)), None)
    return list(seen)


# -- negation normal form --------------------------------------------------

def nnf(f: Formula) -> Formula:
    """Push negations down to atoms, applying epistemic and temporal dualities."""
    return _pos(f)


def _pos(f: Formula) -> Formula:
    if isinstance(f, (Atom, Const)):
        return f
    if isinstance(f, Not):
        return _neg(f.sub)
    if isinstance(f, And):
        return And(_pos(f.left), _pos(f.right))
    if isinstance(f, Or):
        return Or(_pos(f.left), _pos(f.right))
    if isinstance(f, Implies):
        return Or(_neg(f.left), _pos(f.right))
    if isinstance(f, Iff):
        return Or(And(_pos(f.left), _pos(f.right)), And(_neg(f.left), _neg(f.right)))
    if isinstance(f, Knows):
        return Knows(f.agent, _pos(f.sub))
    if isinstance(f, Possible):
        return Possible(f.agent, _pos(f.sub))
    if isinstance(f, Temporal):
        return Temporal(f.op, tuple(_pos(a) for a in f.args))
    raise TypeError(f"not a formula: {f!r}")


def _neg(f: Formula) -> Formula:
    if isinstance(f, Atom):
        return Not(f)
    if isinstance(f, Const):
        return Const(not f.value)
    if isinstance(f, Not):
        return _pos(f.sub)
    if isinstance(f, And):
        return Or(_neg(f.left), _neg(f.right))
    if isinstance(f, Or):
        return And(_neg(f.left), _neg(f.right))
    if isinstance(f, Implies):
        return And(_pos(f.left), _neg(f.right))
    if isinstance(f, Iff):
        return Or(And(_pos(f.left), _neg(f.right)), And(_neg(f.left), _pos(f.right)))
    if isinstance(f, Knows):
        return Possible(f.agent, _neg(f.sub))
    if isinstance(f, Possible):
        return Knows(f.agent, _neg(f.sub))
    if isinstance(f, Temporal):
        return Temporal(_TEMPORAL_DUAL[f.op], tuple(_neg(a) for a in f.args))
    raise TypeError(f"not a formula: {f!r}")


# -- printing ---------------------------------------------------------------

_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4}


def show(f: Formula) -> str:
    return _show(f, 0)


def _show(f: Formula, ctx: int) -> str:
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Const):
        return "true" if f.value else "false"
    if isinstance(f, Not):
        return "!" + _show(f.sub, 9)
    if isinstance(f, (And, Or, Implies, Iff)):
        p = _PREC[type(f)]
        sym = {And: "&", Or: "|", Implies: "->", Iff: "<->"}[type(f)]
        text = f"{_show(f.left, p)} {sym} {_show(f.right, p + 1)}"
        return f"({text})" if p < ctx else text
    if isinstance(f, (Knows, Possible)):
        tag = "K" if isinstance(f, Knows) else "M"
        text = f"{tag}[{f.agent}] {_show(f.sub, 9)}"
        return f"({text})" if ctx > 0 else text
    if isinstance(f, Temporal):
        if f.op in UNARY_TEMPORAL:
            return f"{f.op} {_show(f.args[0], 9)}"
        q, kind = f.op[0], f.op[1]
        return f"{q}[{_show(f.args[0], 0)} {kind} {_show(f.args[1], 0)}]"
    raise TypeError(f"not a formula: {f!r}")


def iter_bits(mask: int) -> Iterator[int]:
    """Indices of set bits in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low
