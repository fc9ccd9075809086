"""Elaboration of a checked specification into a guarded system.

States are all assignments of values to the declared variables, indexed in
mixed radix with the first declared variable most significant (booleans count
false before true).  Comparisons and boolean variables become extensional
atoms; lets are inlined and bounded quantifiers expanded.
"""
from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Optional

from ..ctlk import CheckRequest
from ..formula import (
    FALSE, TRUE, And, Atom, Const, Formula, Iff, Implies, Knows, Not, Or, Possible, Temporal,
    is_propositional,
)
from ..guarded import GuardedAction, GuardedSystem
from ..kernel import Partition, Relation, Signature, StateBasis
from .ast import (
    ARITHMETIC, COMPARISONS, BinOp, BoolLit, BoolType, CtlUnary, CtlUntil, IntLit, Modal, Name,
    NotE, Quant, Spec,
)
from .parser import parse, parse_expr
from .printer import show_expr
from .typecheck import Diagnostic, SpecError, check

__all__ = ["VarInfo", "ElaboratedModel", "elaborate", "load", "expand_expr", "evaluate_in_state",
           "DEFAULT_MAX_STATES"]

DEFAULT_MAX_STATES = 1 << 20


@dataclass(frozen=True)
class VarInfo:
    name: str
    boolean: bool
    lo: int
    hi: int
    stride: int

    @property
    def size(self) -> int:
        return self.hi - self.lo + 1

    def decode(self, s: int):
        v = self.lo + (s // self.stride) % self.size
        return bool(v) if self.boolean else v

    def type_text(self) -> str:
        return "boolean" if self.boolean else f"{self.lo}..{self.hi}"


def _pack(bits) -> int:
    """Bitmask from an iterable of truth values indexed by state."""
    out = 0
    for s, b in enumerate(bits):
        if b:
            out |= 1 << s
    return out


# -- folding constructors --------------------------------------------------------

def _not(f: Formula) -> Formula:
    if isinstance(f, Const):
        return FALSE if f.value else TRUE
    return Not(f)


def _and(a: Formula, b: Formula) -> Formula:
    if a == FALSE or b == FALSE:
        return FALSE
    if a == TRUE:
        return b
    if b == TRUE:
        return a
    return And(a, b)


def _or(a: Formula, b: Formula) -> Formula:
    if a == TRUE or b == TRUE:
        return TRUE
    if a == FALSE:
        return b
    if b == FALSE:
        return a
    return Or(a, b)


def _implies(a: Formula, b: Formula) -> Formula:
    if a == FALSE or b == TRUE:
        return TRUE
    if a == TRUE:
        return b
    if b == FALSE:
        return _not(a)
    return Implies(a, b)


def _iff(a: Formula, b: Formula) -> Formula:
    if isinstance(b, Const):
        return a if b.value else _not(a)
    if isinstance(a, Const):
        return b if a.value else _not(b)
    return Iff(a, b)


_TEMPORAL = {"EX", "EF", "EG", "AX", "AF", "AG"}


class _Elaborator:
    def __init__(self, spec: Spec, max_states: int):
        self.spec = spec
        self.lets = {d.name: d.expr for d in spec.lets}
        self.agents = {d.name: d for d in spec.agents}
        decls = [(n, d.type) for d in spec.vars for n in d.names]
        n = 1
        for _, t in decls:
            n *= 2 if isinstance(t, BoolType) else t.hi - t.lo + 1
        if n > max_states:
            loc = spec.vars[0].loc or (1, 1)
            raise SpecError([Diagnostic(loc[0], loc[1],
                                        f"state space of {n} states exceeds the cap of {max_states}")])
        self.n = n
        self.full = (1 << n) - 1
        stride = n
        infos = []
        for name, t in decls:
            boolean = isinstance(t, BoolType)
            lo, hi = (0, 1) if boolean else (t.lo, t.hi)
            stride //= hi - lo + 1
            infos.append(VarInfo(name, boolean, lo, hi, stride))
        self.vars = {v.name: v for v in infos}
        self.order = infos
        self._vec: dict = {}
        self._eq: dict = {}
        self._let_formula: dict = {}
        self._let_mask: dict = {}
        self._let_int: dict = {}
        self.warnings: list[str] = []

    # -- per-variable tables --
    def vec(self, name: str) -> list:
        v = self._vec.get(name)
        if v is None:
            info = self.vars[name]
            v = [info.lo + (s // info.stride) % info.size for s in range(self.n)]
            self._vec[name] = v
        return v

    def eq_mask(self, name: str, value: int) -> int:
        key = (name, value)
        m = self._eq.get(key)
        if m is None:
            m = _pack(x == value for x in self.vec(name))
            self._eq[key] = m
        return m

    # -- integer expressions: a constant or a per-state list --
    def ival(self, e, env: dict):
        if isinstance(e, IntLit):
            return e.value
        if isinstance(e, Name):
            if e.id in env:
                return env[e.id]
            if e.id in self.vars:
                return self.vec(e.id)
            if e.id not in self._let_int:
                self._let_int[e.id] = self.ival(self.lets[e.id], {})
            return self._let_int[e.id]
        if isinstance(e, BinOp) and e.op in ARITHMETIC:
            a, b = self.ival(e.left, env), self.ival(e.right, env)
            sign = 1 if e.op == "+" else -1
            if isinstance(a, int) and isinstance(b, int):
                return a + sign * b
            if isinstance(a, int):
                return [a + sign * y for y in b]
            if isinstance(b, int):
                return [x + sign * b for x in a]
            return [x + sign * y for x, y in zip(a, b)]
        raise TypeError(f"not an integer expression: {show_expr(e)}")

    def is_bool(self, e, env: dict) -> bool:
        if isinstance(e, (BoolLit, NotE, Modal, CtlUnary, CtlUntil, Quant)):
            return True
        if isinstance(e, IntLit):
            return False
        if isinstance(e, Name):
            if e.id in env:
                return isinstance(env[e.id], bool)
            if e.id in self.vars:
                return self.vars[e.id].boolean
            return self.is_bool(self.lets[e.id], {})
        if isinstance(e, BinOp):
            return e.op not in ARITHMETIC
        raise TypeError(e)

    # -- propositional expressions as masks --
    def bmask(self, e, env: dict) -> int:
        return _formula_mask(self.formula(e, env), self.full)

    # -- formulas --
    def formula(self, e, env: dict) -> Formula:
        if isinstance(e, BoolLit):
            return TRUE if e.value else FALSE
        if isinstance(e, Name):
            if e.id in env:
                return TRUE if env[e.id] else FALSE
            if e.id in self.vars:
                return Atom(e.id, self.eq_mask(e.id, 1))
            f = self._let_formula.get(e.id)
            if f is None:
                f = self.formula(self.lets[e.id], {})
                self._let_formula[e.id] = f
            return f
        if isinstance(e, NotE):
            return _not(self.formula(e.sub, env))
        if isinstance(e, Modal):
            sub = self.formula(e.sub, env)
            return Knows(e.agent, sub) if e.kind == "K" else Possible(e.agent, sub)
        if isinstance(e, CtlUnary):
            return Temporal(e.op, (self.formula(e.sub, env),))
        if isinstance(e, CtlUntil):
            return Temporal(e.quant + "U", (self.formula(e.left, env), self.formula(e.right, env)))
        if isinstance(e, Quant):
            values = [False, True] if isinstance(e.type, BoolType) else list(e.type.values)
            combine, unit = (_or, FALSE) if e.kind == "exists" else (_and, TRUE)
            out = None
            for v in values:
                inner = dict(env)
                inner[e.var] = v
                f = self.formula(e.body, inner)
                out = f if out is None else combine(out, f)
            return unit if out is None else out
        if isinstance(e, BinOp):
            if e.op in COMPARISONS:
                if e.op in ("=", "!=") and self.is_bool(e.left, env):
                    f = _iff(self.formula(e.left, env), self.formula(e.right, env))
                    return f if e.op == "=" else _not(f)
                return self.comparison(e, env)
            a, b = self.formula(e.left, env), self.formula(e.right, env)
            return {"&": _and, "|": _or, "->": _implies, "<->": _iff}[e.op](a, b)
        raise TypeError(f"not a boolean expression: {e!r}")

    def comparison(self, e: BinOp, env: dict) -> Formula:
        a, b = self.ival(e.left, env), self.ival(e.right, env)
        test = _CMP[e.op]
        if isinstance(a, int) and isinstance(b, int):
            return TRUE if test(a, b) else FALSE
        if isinstance(a, int):
            mask = _pack(test(a, y) for y in b)
        elif isinstance(b, int) and e.op == "=" and isinstance(e.left, Name) and e.left.id in self.vars:
            mask = self.eq_mask(e.left.id, b)
        elif isinstance(b, int):
            mask = _pack(test(x, b) for x in a)
        else:
            mask = _pack(test(x, y) for x, y in zip(a, b))
        return Atom(show_expr(e, env), mask)

    # -- declarations --
    def initial_mask(self) -> int:
        m = self.full
        for d in self.spec.vars:
            if d.initial is not None:
                m &= self.bmask(d.initial, {})
        return m

    def basis(self) -> StateBasis:
        order = self.order
        props = []
        for v in order:
            props += [v.name] if v.boolean else [f"{v.name}={x}" for x in range(v.lo, v.hi + 1)]
        labels = []
        names = []
        for s in range(self.n):
            lab = []
            parts = []
            for v in order:
                x = v.decode(s)
                if v.boolean:
                    if x:
                        lab.append(v.name)
                    parts.append(f"{v.name}={'true' if x else 'false'}")
                else:
                    lab.append(f"{v.name}={x}")
                    parts.append(f"{v.name}={x}")
            labels.append(frozenset(lab))
            names.append(",".join(parts))
        access = {}
        for a in self.spec.agents:
            obs = [self.vars[x] for x in a.observed]
            access[a.name] = Partition([tuple((s // v.stride) % v.size for v in obs) for s in range(self.n)])
        init = self.initial_mask()
        sig = Signature(tuple(props), tuple(access))
        return StateBasis(self.n, tuple(labels), init, access, sig, tuple(names))

    def action(self, d) -> GuardedAction:
        guard = self.formula(d.guard, {}) if d.guard is not None else TRUE
        sources = _formula_mask(_propositional_part(guard), self.full)
        deltas = []       # per assignment: list of (new value or None) per state
        for a in d.assigns:
            info = self.vars[a.target]
            if info.boolean:
                m = self.bmask(a.expr, {})
                new = [m >> s & 1 for s in range(self.n)]
            else:
                v = self.ival(a.expr, {})
                new = [v] * self.n if isinstance(v, int) else v
            deltas.append((a, info, new))
        pairs = []
        dropped: dict = {}
        for s in _bits(sources):
            t = s
            ok = True
            for a, info, new in deltas:
                x = new[s]
                if not info.lo <= x <= info.hi:
                    ok = False
                    dropped.setdefault(a.target, [a, 0])[1] += 1
                    break
                t += (x - info.lo - (s // info.stride) % info.size) * info.stride
            if ok:
                pairs.append((s, t))
        for target, (a, count) in dropped.items():
            info = self.vars[target]
            self.warnings.append(
                f"action {d.name}: {target} := {show_expr(a.expr)} leaves {info.type_text()} "
                f"in {count} source state(s); those transitions are dropped")
        return GuardedAction(d.name, guard, Relation.from_pairs(self.n, pairs))


_CMP = {
    "=": lambda x, y: x == y, "!=": lambda x, y: x != y,
    "<": lambda x, y: x < y, "<=": lambda x, y: x <= y,
    ">": lambda x, y: x > y, ">=": lambda x, y: x >= y,
}


def _bits(mask: int):
    s = 0
    while mask:
        if mask & 1:
            yield s
        mask >>= 1
        s += 1


def _propositional_part(f: Formula) -> Formula:
    """Conjunction of the top-level conjuncts of ``f`` that are state predicates."""
    if isinstance(f, And):
        return _and(_propositional_part(f.left), _propositional_part(f.right))
    return f if is_propositional(f) else TRUE


def _formula_mask(f: Formula, full: int) -> int:
    if isinstance(f, Const):
        return full if f.value else 0
    if isinstance(f, Atom):
        return f.mask
    if isinstance(f, Not):
        return full & ~_formula_mask(f.sub, full)
    if isinstance(f, And):
        return _formula_mask(f.left, full) & _formula_mask(f.right, full)
    if isinstance(f, Or):
        return _formula_mask(f.left, full) | _formula_mask(f.right, full)
    if isinstance(f, Implies):
        return (full & ~_formula_mask(f.left, full)) | _formula_mask(f.right, full)
    if isinstance(f, Iff):
        a, b = _formula_mask(f.left, full), _formula_mask(f.right, full)
        return full & ~(a ^ b)
    raise TypeError("state predicate expected")


# -- model -----------------------------------------------------------------------

@dataclass
class ElaboratedModel:
    system: GuardedSystem
    checks: list
    variables: list
    warnings: list = field(default_factory=list)
    spec: Optional[Spec] = None
    source_hash: Optional[str] = None
    _elab: object = field(default=None, repr=False)

    @property
    def basis(self) -> StateBasis:
        return self.system.basis

    @property
    def n_states(self) -> int:
        return self.basis.n

    def values(self, s: int) -> dict:
        return {v.name: v.decode(s) for v in self.variables}

    def show_state(self, s: int) -> str:
        return self.basis.names[s]

    def state_index(self, **values) -> int:
        s = 0
        for v in self.variables:
            if v.name not in values:
                raise KeyError(f"missing value for {v.name}")
            x = int(values[v.name])
            if not v.lo <= x <= v.hi:
                raise ValueError(f"{v.name}={x} outside {v.type_text()}")
            s += (x - v.lo) * v.stride
        return s

    def action_relations(self) -> list:
        return [(a.name, a.relation) for a in self.system.actions]

    def expand(self, expr, env: dict = None) -> Formula:
        if isinstance(expr, str):
            expr = parse_expr(expr)
        return self._elab.formula(expr, dict(env or {}))

    def mask(self, expr, env: dict = None) -> int:
        return _formula_mask(self.expand(expr, env), self.basis.full_mask)


def elaborate(spec: Spec, max_states: int = DEFAULT_MAX_STATES, source: str = None) -> ElaboratedModel:
    """Build the guarded system and check requests of an already checked spec."""
    el = _Elaborator(spec, max_states)
    basis = el.basis()
    actions = [el.action(d) for d in spec.actions]
    system = GuardedSystem(basis, actions)
    checks = []
    for c in spec.checks:
        f = el.formula(c.expr, {})
        checks.append(CheckRequest(c.kind, f, c.text or show_expr(c.expr), c.loc))
    warnings = list(el.warnings)
    if basis.initial == 0:
        warnings.append("no initial states: the initial clauses are unsatisfiable")
    digest = hashlib.sha256(source.encode()).hexdigest()[:16] if source is not None else None
    return ElaboratedModel(system, checks, el.order, warnings, spec, digest, el)


def load(text: str, max_states: int = DEFAULT_MAX_STATES) -> ElaboratedModel:
    """Parse, check and elaborate specification text."""
    spec = parse(text)
    check(spec)
    return elaborate(spec, max_states, source=text)


def expand_expr(expr, model: ElaboratedModel, env: dict = None) -> Formula:
    """Formula for an expression over ``model``'s variables, lets inlined and quantifiers expanded."""
    return model.expand(expr, env)


def evaluate_in_state(expr, model: ElaboratedModel, s: int, env: dict = None):
    """Direct evaluation of a state expression at one state, without expansion."""
    if isinstance(expr, str):
        expr = parse_expr(expr)
    vals = model.values(s)
    lets = {d.name: d.expr for d in model.spec.lets} if model.spec else {}
    return _direct(expr, vals, lets, dict(env or {}))


def _direct(e, vals: dict, lets: dict, env: dict):
    if isinstance(e, (BoolLit, IntLit)):
        return e.value
    if isinstance(e, Name):
        if e.id in env:
            return env[e.id]
        if e.id in vals:
            return vals[e.id]
        return _direct(lets[e.id], vals, lets, {})
    if isinstance(e, NotE):
        return not _direct(e.sub, vals, lets, env)
    if isinstance(e, Quant):
        values = [False, True] if isinstance(e.type, BoolType) else list(e.type.values)
        results = (_direct(e.body, vals, lets, {**env, e.var: v}) for v in values)
        return any(results) if e.kind == "exists" else all(results)
    if isinstance(e, BinOp):
        a = _direct(e.left, vals, lets, env)
        b = _direct(e.right, vals, lets, env)
        op = e.op
        if op == "&":
            return a and b
        if op == "|":
            return a or b
        if op == "->":
            return (not a) or b
        if op == "<->":
            return a == b
        if op == "+":
            return a + b
        if op == "-":
            return a - b
        return _CMP[op](a, b)
    raise ValueError("direct evaluation covers state expressions only")
