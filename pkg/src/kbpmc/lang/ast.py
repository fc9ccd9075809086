"""Syntax tree of specifications.  Source locations never take part in equality."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

Loc = Optional[tuple]


def _loc():
    return field(default=None, compare=False, repr=False)


# -- types -------------------------------------------------------------------

@dataclass(frozen=True)
class BoolType:
    loc: Loc = _loc()


@dataclass(frozen=True)
class RangeType:
    lo: int
    hi: int
    loc: Loc = _loc()

    @property
    def values(self) -> range:
        return range(self.lo, self.hi + 1)


Type = Union[BoolType, RangeType]


# -- expressions ---------------------------------------------------------------

class Expr:
    pass


@dataclass(frozen=True)
class BoolLit(Expr):
    value: bool
    loc: Loc = _loc()


@dataclass(frozen=True)
class IntLit(Expr):
    value: int
    loc: Loc = _loc()


@dataclass(frozen=True)
class Name(Expr):
    id: str
    loc: Loc = _loc()


@dataclass(frozen=True)
class NotE(Expr):
    sub: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class BinOp(Expr):
    op: str          # & | -> <-> = != < <= > >= + -
    left: Expr
    right: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Modal(Expr):
    kind: str        # "K" or "M"
    agent: str
    sub: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class CtlUnary(Expr):
    op: str          # EX EF EG AX AF AG
    sub: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class CtlUntil(Expr):
    quant: str       # "E" or "A"
    left: Expr
    right: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Quant(Expr):
    kind: str        # "exists" or "forall"
    var: str
    type: Type
    body: Expr
    loc: Loc = _loc()


CONNECTIVES = {"&", "|", "->", "<->"}
COMPARISONS = {"=", "!=", "<", "<=", ">", ">="}
ARITHMETIC = {"+", "-"}


# -- declarations --------------------------------------------------------------

@dataclass(frozen=True)
class VarDecl:
    names: tuple
    type: Type
    initial: Optional[Expr] = None
    loc: Loc = _loc()


@dataclass(frozen=True)
class AgentDecl:
    name: str
    observed: tuple
    loc: Loc = _loc()


@dataclass(frozen=True)
class LetDecl:
    name: str
    expr: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class Assign:
    target: str
    expr: Expr
    loc: Loc = _loc()


@dataclass(frozen=True)
class ActionDecl:
    name: str
    guard: Optional[Expr]
    assigns: tuple
    loc: Loc = _loc()


@dataclass(frozen=True)
class CheckDecl:
    kind: str        # "initial" or "reachable"
    expr: Expr
    text: str = field(default="", compare=False)
    loc: Loc = _loc()


@dataclass(frozen=True)
class Spec:
    items: tuple = ()

    def _of(self, cls):
        return [i for i in self.items if isinstance(i, cls)]

    @property
    def vars(self) -> list[VarDecl]:
        return self._of(VarDecl)

    @property
    def agents(self) -> list[AgentDecl]:
        return self._of(AgentDecl)

    @property
    def lets(self) -> list[LetDecl]:
        return self._of(LetDecl)

    @property
    def actions(self) -> list[ActionDecl]:
        return self._of(ActionDecl)

    @property
    def checks(self) -> list[CheckDecl]:
        return self._of(CheckDecl)


def expr_children(e: Expr) -> tuple:
    if isinstance(e, (NotE, Modal, CtlUnary)):
        return (e.sub,)
    if isinstance(e, (BinOp, CtlUntil)):
        return (e.left, e.right)
    if isinstance(e, Quant):
        return (e.body,)
    return ()


def walk(e: Expr):
    yield e
    for c in expr_children(e):
        yield from walk(c)
