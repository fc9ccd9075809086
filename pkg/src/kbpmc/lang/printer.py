"""Pretty-printer whose output re-parses to an equal syntax tree."""
from __future__ import annotations

from .ast import (
    ActionDecl, AgentDecl, BinOp, BoolLit, BoolType, CheckDecl, CtlUnary, CtlUntil, IntLit,
    LetDecl, Modal, Name, NotE, Quant, Spec, VarDecl,
)

__all__ = ["show_expr", "show_type", "show_spec"]

TOP, IFF, IMP, OR, AND, UNARY, CMP, SUM, TERM = range(9)
_LEVEL = {"<->": IFF, "->": IMP, "|": OR, "&": AND,
          "=": CMP, "!=": CMP, "<": CMP, "<=": CMP, ">": CMP, ">=": CMP, "+": SUM, "-": SUM}


def show_type(t) -> str:
    if isinstance(t, BoolType):
        return "boolean"
    return f"{t.lo}..{t.hi}"


def show_expr(e, env: dict = None) -> str:
    """Render an expression; names bound in ``env`` print as their values."""
    return _show(e, TOP, env or {})


def _lit(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return str(v)


def _show(e, ctx: int, env: dict) -> str:
    if isinstance(e, BoolLit):
        return _lit(e.value)
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, Name):
        if e.id in env:
            v = env[e.id]
            s = _lit(v)
            return f"({s})" if isinstance(v, int) and not isinstance(v, bool) and v < 0 else s
        return e.id
    if isinstance(e, Quant):
        inner = dict(env)
        inner.pop(e.var, None)
        s = f"{e.kind} {e.var}:{show_type(e.type)} . {_show(e.body, TOP, inner)}"
        level = TOP
    elif isinstance(e, Modal):
        s = f"{e.kind}[{e.agent}] {_show(e.sub, TOP, env)}"
        level = TOP
    elif isinstance(e, NotE):
        s = "!" + _show(e.sub, UNARY, env)
        level = UNARY
    elif isinstance(e, CtlUnary):
        s = f"{e.op} {_show(e.sub, UNARY, env)}"
        level = UNARY
    elif isinstance(e, CtlUntil):
        s = f"{e.quant}[{_show(e.left, TOP, env)} U {_show(e.right, TOP, env)}]"
        level = TERM
    elif isinstance(e, BinOp):
        level = _LEVEL[e.op]
        if e.op == "->":
            lc, rc = level + 1, level
        elif level == CMP:
            lc = rc = SUM
        elif level == SUM:
            lc, rc = SUM, TERM
        else:
            lc, rc = level, level + 1
        s = f"{_show(e.left, lc, env)} {e.op} {_show(e.right, rc, env)}"
    else:
        raise TypeError(f"not an expression: {e!r}")
    return f"({s})" if level < ctx else s


def show_decl(d) -> str:
    if isinstance(d, VarDecl):
        init = f" initial {show_expr(d.initial)}" if d.initial is not None else ""
        return f"var {', '.join(d.names)} : {show_type(d.type)}{init};"
    if isinstance(d, AgentDecl):
        return f"agent {d.name} = {{ {', '.join(d.observed)} }};" if d.observed else f"agent {d.name} = {{}};"
    if isinstance(d, LetDecl):
        return f"let {d.name} = {show_expr(d.expr)};"
    if isinstance(d, ActionDecl):
        guard = f" guard {show_expr(d.guard)}" if d.guard is not None else ""
        body = ", ".join(f"{a.target} := {show_expr(a.expr)}" for a in d.assigns)
        return f"action {d.name}{guard} do {body};" if body else f"action {d.name}{guard} do ;"
    if isinstance(d, CheckDecl):
        return f"check {d.kind} {show_expr(d.expr)};"
    raise TypeError(f"not a declaration: {d!r}")


def show_spec(spec: Spec) -> str:
    return "".join(show_decl(d) + "\n" for d in spec.items)
