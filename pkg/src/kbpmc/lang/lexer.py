"""Tokenizer for the specification language."""
from __future__ import annotations

import re
from dataclasses import dataclass

KEYWORDS = {
    "var", "boolean", "initial", "agent", "let", "action", "guard", "do", "check",
    "reachable", "exists", "forall", "true", "false", "and", "or", "not",
    "EX", "EF", "EG", "AX", "AF", "AG",
}

# longest symbols first so that ``<->`` wins over ``<`` and ``..`` over ``.``
SYMBOLS = [":=", "<->", "->", "!=", "<=", ">=", "..",
           "=", "<", ">", "&", "|", "!", "(", ")", "[", "]", "{", "}", ",", ";", ":", ".", "+", "-"]

_TOKEN = re.compile(
    r"(?P<ws>[ \t\r\f\v]+)|(?P<nl>\n)|(?P<comment>--[^\n]*)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>[0-9]+)"
    r"|(?P<sym>" + "|".join(re.escape(s) for s in SYMBOLS) + ")"
)


@dataclass(frozen=True)
class Token:
    kind: str        # "ident", "int", "kw", "sym" or "eof"
    text: str
    line: int
    col: int
    offset: int

    @property
    def loc(self) -> tuple[int, int]:
        return (self.line, self.col)

    def is_(self, *texts: str) -> bool:
        return self.kind in ("kw", "sym") and self.text in texts

    def __str__(self) -> str:
        return "end of input" if self.kind == "eof" else repr(self.text)


class LexError(ValueError):
    def __init__(self, line: int, col: int, msg: str):
        super().__init__(f"{line}:{col}: {msg}")
        self.line, self.col, self.msg = line, col, msg


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise LexError(line, pos - line_start + 1, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        word = m.group()
        col = pos - line_start + 1
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind == "ident":
            tokens.append(Token("kw" if word in KEYWORDS else "ident", word, line, col, pos))
        elif kind == "int":
            tokens.append(Token("int", word, line, col, pos))
        elif kind == "sym":
            tokens.append(Token("sym", word, line, col, pos))
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1, pos))
    return tokens
