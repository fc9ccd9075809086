"""Static checks: scoping, types, and where modal operators may appear."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import (
    ARITHMETIC, COMPARISONS, CONNECTIVES, BinOp, BoolLit, BoolType, CtlUnary, CtlUntil,
    IntLit, Modal, Name, NotE, Quant, RangeType, Spec,
)
from .printer import show_type

__all__ = ["Diagnostic", "SpecError", "typecheck", "check"]

BOOL, INT = "boolean", "integer"


@dataclass(frozen=True)
class Diagnostic:
    line: int
    col: int
    message: str

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class SpecError(ValueError):
    """A specification was rejected; carries every diagnostic found."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(map(str, self.diagnostics)))


def _at(node) -> tuple[int, int]:
    loc = getattr(node, "loc", None)
    return loc if loc else (0, 0)


class _Checker:
    def __init__(self, spec: Spec):
        self.spec = spec
        self.diags: list[Diagnostic] = []
        self.vars: dict = {}
        self.lets: dict = {}
        self.agents: dict = {}
        self.let_types: dict = {}
        self.let_modal: dict = {}
        self._visiting: list = []

    def err(self, node, msg: str):
        line, col = _at(node)
        self.diags.append(Diagnostic(line, col, msg))

    # -- declarations --
    def run(self) -> list[Diagnostic]:
        spec = self.spec
        for d in spec.vars:
            if isinstance(d.type, RangeType) and d.type.lo > d.type.hi:
                self.err(d.type, f"empty range {show_type(d.type)}")
            for n in d.names:
                if n in self.vars:
                    self.err(d, f"variable {n!r} declared twice")
                self.vars[n] = d.type
        if not spec.vars:
            self.diags.append(Diagnostic(1, 1, "specification declares no variables"))
        for d in spec.lets:
            if d.name in self.vars or d.name in self.lets:
                self.err(d, f"name {d.name!r} already defined")
            else:
                self.lets[d.name] = d
        for d in spec.agents:
            if d.name in self.agents:
                self.err(d, f"agent {d.name!r} declared twice")
            self.agents[d.name] = d
            seen = set()
            for v in d.observed:
                if v not in self.vars:
                    self.err(d, f"agent {d.name} observes undeclared variable {v!r}")
                if v in seen:
                    self.err(d, f"agent {d.name} lists {v!r} twice")
                seen.add(v)
        for d in spec.lets:
            if self.lets.get(d.name) is d:
                self.let_type(d.name, d)
        for d in spec.vars:
            if d.initial is not None:
                self.want_bool(d.initial, "initial clause")
                if self.modal(d.initial):
                    self.err(d.initial, "initial clauses must be state predicates (no K, M or CTL operators)")
        names = set()
        for d in spec.actions:
            if d.name in names:
                self.err(d, f"action {d.name!r} declared twice")
            names.add(d.name)
            if d.guard is not None:
                self.want_bool(d.guard, f"guard of action {d.name}")
            targets = set()
            for a in d.assigns:
                if a.target not in self.vars:
                    self.err(a, f"assignment to undeclared variable {a.target!r}")
                    self.type_of(a.expr, {})
                    continue
                if a.target in targets:
                    self.err(a, f"variable {a.target!r} assigned twice in action {d.name}")
                targets.add(a.target)
                vt = self.vars[a.target]
                want = BOOL if isinstance(vt, BoolType) else INT
                got = self.type_of(a.expr, {})
                if got is not None and got != want:
                    self.err(a, f"cannot assign a {got} value to {want} variable {a.target!r}")
                if self.modal(a.expr):
                    self.err(a.expr, "assigned values must be state expressions (no K, M or CTL operators)")
                if want == INT and got == INT:
                    v = _constant(a.expr)
                    if v is not None and not vt.lo <= v <= vt.hi:
                        self.err(a.expr, f"constant {v} is outside the range {show_type(vt)} of {a.target!r}")
        for d in spec.checks:
            self.want_bool(d.expr, f"{d.kind} check")
            if d.kind == "reachable" and self.modal(d.expr):
                self.err(d.expr, "reachable checks take state predicates only (no K, M or CTL operators)")
        return self.diags

    def want_bool(self, e, what: str):
        t = self.type_of(e, {})
        if t is not None and t != BOOL:
            self.err(e, f"{what} must be boolean, not {t}")

    # -- lets --
    def let_type(self, name: str, node) -> Optional[str]:
        if name in self.let_types:
            return self.let_types[name]
        if name in self._visiting:
            cycle = " -> ".join(self._visiting[self._visiting.index(name):] + [name])
            self.err(node, f"cyclic definitions: {cycle}")
            self.let_types[name] = None
            return None
        self._visiting.append(name)
        t = self.type_of(self.lets[name].expr, {})
        self._visiting.pop()
        self.let_types.setdefault(name, t)
        return self.let_types[name]

    def modal(self, e, seen=()) -> bool:
        if isinstance(e, (Modal, CtlUnary, CtlUntil)):
            return True
        if isinstance(e, Name) and e.id in self.lets and e.id not in seen:
            if e.id not in self.let_modal:
                self.let_modal[e.id] = self.modal(self.lets[e.id].expr, seen + (e.id,))
            return self.let_modal[e.id]
        if isinstance(e, NotE):
            return self.modal(e.sub, seen)
        if isinstance(e, BinOp):
            return self.modal(e.left, seen) or self.modal(e.right, seen)
        if isinstance(e, Quant):
            return self.modal(e.body, seen)
        return False

    # -- expressions --
    def type_of(self, e, binders: dict) -> Optional[str]:
        if isinstance(e, BoolLit):
            return BOOL
        if isinstance(e, IntLit):
            return INT
        if isinstance(e, Name):
            if e.id in binders:
                return BOOL if isinstance(binders[e.id], BoolType) else INT
            if e.id in self.vars:
                return BOOL if isinstance(self.vars[e.id], BoolType) else INT
            if e.id in self.lets:
                return self.let_type(e.id, e)
            self.err(e, f"undeclared name {e.id!r}")
            return None
        if isinstance(e, NotE):
            self._operand(e.sub, binders, BOOL, "'!'")
            return BOOL
        if isinstance(e, Modal):
            if e.agent not in self.agents:
                self.err(e, f"undeclared agent {e.agent!r}")
            self._operand(e.sub, binders, BOOL, f"{e.kind}[{e.agent}]")
            return BOOL
        if isinstance(e, CtlUnary):
            self._operand(e.sub, binders, BOOL, e.op)
            return BOOL
        if isinstance(e, CtlUntil):
            self._operand(e.left, binders, BOOL, f"{e.quant}[.. U ..]")
            self._operand(e.right, binders, BOOL, f"{e.quant}[.. U ..]")
            return BOOL
        if isinstance(e, Quant):
            if e.var in binders or e.var in self.vars or e.var in self.lets:
                self.err(e, f"bound variable {e.var!r} shadows an existing name")
            if isinstance(e.type, RangeType) and e.type.lo > e.type.hi:
                self.err(e.type, f"empty range {show_type(e.type)}")
            inner = dict(binders)
            inner[e.var] = e.type
            self._operand(e.body, inner, BOOL, e.kind)
            return BOOL
        if isinstance(e, BinOp):
            if e.op in CONNECTIVES:
                self._operand(e.left, binders, BOOL, f"'{e.op}'")
                self._operand(e.right, binders, BOOL, f"'{e.op}'")
                return BOOL
            if e.op in ARITHMETIC:
                self._operand(e.left, binders, INT, f"'{e.op}'")
                self._operand(e.right, binders, INT, f"'{e.op}'")
                return INT
            if e.op in COMPARISONS:
                lt = self.type_of(e.left, binders)
                rt = self.type_of(e.right, binders)
                if e.op in ("=", "!="):
                    if lt is not None and rt is not None and lt != rt:
                        self.err(e, f"cannot compare {lt} with {rt}")
                else:
                    for side, t in ((e.left, lt), (e.right, rt)):
                        if t is not None and t != INT:
                            self.err(side, f"'{e.op}' needs integer operands, not {t}")
                return BOOL
        raise TypeError(f"unknown expression {e!r}")

    def _operand(self, e, binders, want: str, what: str):
        t = self.type_of(e, binders)
        if t is not None and t != want:
            self.err(e, f"operand of {what} must be {want}, not {t}")


def _constant(e) -> Optional[int]:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, BinOp) and e.op in ARITHMETIC:
        a, b = _constant(e.left), _constant(e.right)
        if a is None or b is None:
            return None
        return a + b if e.op == "+" else a - b
    return None


def typecheck(spec: Spec) -> list[Diagnostic]:
    """All diagnostics for ``spec`` in source order of discovery; empty when clean."""
    return _Checker(spec).run()


def check(spec: Spec) -> None:
    diags = typecheck(spec)
    if diags:
        raise SpecError(diags)
