"""Specification language: parsing, checking and elaboration to guarded systems."""
from .ast import Spec
from .elaborate import (
    DEFAULT_MAX_STATES, ElaboratedModel, VarInfo, elaborate, evaluate_in_state, expand_expr, load,
)
from .lexer import LexError, tokenize
from .parser import ParseError, parse, parse_expr
from .printer import show_expr, show_spec
from .typecheck import Diagnostic, SpecError, check, typecheck

__all__ = [
    "Spec", "ElaboratedModel", "VarInfo", "elaborate", "evaluate_in_state", "expand_expr", "load",
    "LexError", "tokenize", "ParseError", "parse", "parse_expr", "show_expr", "show_spec",
    "Diagnostic", "SpecError", "check", "typecheck", "DEFAULT_MAX_STATES",
]
