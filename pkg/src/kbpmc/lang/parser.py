"""Recursive-descent parser for specifications.

Operator binding, loosest first: quantifiers, ``K[a]`` and ``M[a]`` (all of
which extend as far right as possible), ``<->``, ``->`` (right associative),
``|``/``or``, ``&``/``and``, prefix ``!``/``not`` and the CTL prefixes
``EX EF EG AX AF AG`` (which bind to a single unary operand), comparisons,
``+``/``-``.
"""
from __future__ import annotations

from .ast import (
    ActionDecl, AgentDecl, Assign, BinOp, BoolLit, BoolType, CheckDecl, CtlUnary, CtlUntil,
    IntLit, LetDecl, Modal, Name, NotE, Quant, RangeType, Spec, VarDecl,
)
from .lexer import LexError, Token, tokenize

__all__ = ["parse", "parse_expr", "ParseError"]

CTL_PREFIX = {"EX", "EF", "EG", "AX", "AF", "AG"}
CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")


class ParseError(ValueError):
    def __init__(self, line: int, col: int, msg: str):
        super().__init__(f"{line}:{col}: {msg}")
        self.line, self.col, self.msg = line, col, msg


class _Parser:
    def __init__(self, text: str):
        self.text = text
        try:
            self.toks = tokenize(text)
        except LexError as e:
            raise ParseError(e.line, e.col, e.msg) from None
        self.i = 0

    # -- token helpers --
    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def advance(self) -> Token:
        t = self.toks[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def error(self, msg: str, tok: Token = None):
        tok = tok or self.tok
        raise ParseError(tok.line, tok.col, msg)

    def expect(self, text: str, what: str = None) -> Token:
        if not self.tok.is_(text):
            if self.tok.kind == "eof" and text == ";":
                self.error("unterminated declaration: expected ';' before end of input")
            self.error(f"expected {what or repr(text)}, found {self.tok}")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        if self.tok.kind != "ident":
            self.error(f"expected {what}, found {self.tok}")
        return self.advance()

    def accept(self, *texts: str):
        if self.tok.is_(*texts):
            return self.advance()
        return None

    # -- declarations --
    def spec(self) -> Spec:
        items = []
        while self.tok.kind != "eof":
            items.append(self.item())
        return Spec(tuple(items))

    def item(self):
        t = self.tok
        if t.is_("var"):
            self.advance()
            names = [self.ident("variable name").text]
            while self.accept(","):
                names.append(self.ident("variable name").text)
            self.expect(":")
            typ = self.type_()
            init = self.expr() if self.accept("initial") else None
            self.expect(";")
            return VarDecl(tuple(names), typ, init, loc=t.loc)
        if t.is_("agent"):
            self.advance()
            name = self.ident("agent name").text
            self.expect("=")
            self.expect("{")
            obs = []
            if not self.tok.is_("}"):
                obs.append(self.ident("observed variable").text)
                while self.accept(","):
                    obs.append(self.ident("observed variable").text)
            self.expect("}", "'}' or ','")
            self.expect(";")
            return AgentDecl(name, tuple(obs), loc=t.loc)
        if t.is_("let"):
            self.advance()
            name = self.ident("definition name").text
            self.expect("=")
            e = self.expr()
            self.expect(";")
            return LetDecl(name, e, loc=t.loc)
        if t.is_("action"):
            self.advance()
            name = self.ident("action name").text
            guard = self.expr() if self.accept("guard") else None
            self.expect("do", "'do'")
            assigns = []
            if not self.tok.is_(";"):
                assigns.append(self.assign())
                while self.accept(","):
                    assigns.append(self.assign())
            self.expect(";")
            return ActionDecl(name, guard, tuple(assigns), loc=t.loc)
        if t.is_("check"):
            self.advance()
            kind = self.tok
            if not kind.is_("initial", "reachable"):
                self.error(f"expected 'initial' or 'reachable', found {kind}")
            self.advance()
            start = self.tok.offset
            e = self.expr()
            end = self.tok.offset
            self.expect(";")
            text = " ".join(self.text[start:end].split())
            return CheckDecl(kind.text, e, text, loc=t.loc)
        self.error(f"expected a declaration (var, agent, let, action, check), found {t}")

    def assign(self) -> Assign:
        t = self.ident("assignment target")
        self.expect(":=")
        return Assign(t.text, self.expr(), loc=t.loc)

    def int_(self) -> int:
        neg = self.accept("-")
        if self.tok.kind != "int":
            self.error(f"expected integer, found {self.tok}")
        v = int(self.advance().text)
        return -v if neg else v

    def type_(self):
        t = self.tok
        if self.accept("boolean"):
            return BoolType(loc=t.loc)
        if t.kind == "int" or t.is_("-"):
            lo = self.int_()
            self.expect("..")
            hi = self.int_()
            return RangeType(lo, hi, loc=t.loc)
        self.error(f"expected a type ('boolean' or lo..hi), found {t}")

    # -- expressions --
    def _bracket_agent(self) -> str:
        self.expect("[")
        a = self.ident("agent name").text
        self.expect("]")
        return a

    def expr(self):
        t = self.tok
        if t.is_("exists", "forall"):
            self.advance()
            var = self.ident("bound variable").text
            self.expect(":")
            typ = self.type_()
            self.expect(".")
            return Quant(t.text, var, typ, self.expr(), loc=t.loc)
        if t.kind == "ident" and t.text in ("K", "M") and self.peek().is_("["):
            self.advance()
            agent = self._bracket_agent()
            return Modal(t.text, agent, self.expr(), loc=t.loc)
        return self.iff()

    def iff(self):
        e = self.imp()
        while True:
            t = self.accept("<->")
            if not t:
                return e
            e = BinOp("<->", e, self.imp(), loc=t.loc)

    def imp(self):
        e = self.or_()
        t = self.accept("->")
        if t:
            return BinOp("->", e, self.imp(), loc=t.loc)
        return e

    def or_(self):
        e = self.and_()
        while True:
            t = self.accept("|", "or")
            if not t:
                return e
            e = BinOp("|", e, self.and_(), loc=t.loc)

    def and_(self):
        e = self.unary()
        while True:
            t = self.accept("&", "and")
            if not t:
                return e
            e = BinOp("&", e, self.unary(), loc=t.loc)

    def unary(self):
        t = self.tok
        if t.is_("!", "not"):
            self.advance()
            return NotE(self.unary(), loc=t.loc)
        if t.kind == "ident" and t.text in ("K", "M") and self.peek().is_("["):
            return self.expr()
        if t.is_("exists", "forall"):
            return self.expr()
        if t.kind == "kw" and t.text in CTL_PREFIX:
            self.advance()
            return CtlUnary(t.text, self.unary(), loc=t.loc)
        return self.cmp()

    def cmp(self):
        e = self.sum_()
        t = self.accept(*CMP_OPS)
        if t:
            e = BinOp(t.text, e, self.sum_(), loc=t.loc)
            if self.tok.is_(*CMP_OPS):
                self.error("comparisons do not chain; add parentheses")
        return e

    def sum_(self):
        e = self.term()
        while True:
            t = self.accept("+", "-")
            if not t:
                return e
            e = BinOp(t.text, e, self.term(), loc=t.loc)

    def term(self):
        t = self.tok
        if t.kind == "int":
            self.advance()
            return IntLit(int(t.text), loc=t.loc)
        if t.is_("true", "false"):
            self.advance()
            return BoolLit(t.text == "true", loc=t.loc)
        if t.kind == "ident" and t.text in ("E", "A") and self.peek().is_("["):
            self.advance()
            self.expect("[")
            left = self.expr()
            u = self.tok
            if not (u.kind == "ident" and u.text == "U"):
                self.error(f"expected 'U', found {u}")
            self.advance()
            right = self.expr()
            self.expect("]")
            return CtlUntil(t.text, left, right, loc=t.loc)
        if t.kind == "ident":
            self.advance()
            return Name(t.text, loc=t.loc)
        if t.is_("("):
            self.advance()
            e = self.expr()
            self.expect(")", "')'")
            return e
        self.error(f"expected an expression, found {t}")


def parse(text: str) -> Spec:
    """Parse a specification; raises :class:`ParseError` with a location."""
    return _Parser(text).spec()


def parse_expr(text: str):
    p = _Parser(text)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok} after expression")
    return e
