"""Tokenizer for the Java subset."""

from __future__ import annotations

import re
from dataclasses import dataclass


class ParseError(Exception):
    """Raised on malformed input. Carries a 1-based line/column."""

    def __init__(self, message: str, line: int, column: int, expected: frozenset[str] = frozenset()):
        self.line = line
        self.column = column
        self.expected = expected
        detail = f" (expected one of: {', '.join(sorted(expected))})" if expected else ""
        super().__init__(f"{line}:{column}: {message}{detail}")


KEYWORDS = frozenset("""
abstract assert boolean break byte case char class continue default do double
else extends false final float for if int long new null package private
protected public return short static super switch this throw true void while
""".split())

PRIMITIVES = frozenset({"boolean", "byte", "char", "short", "int", "long", "float", "double"})

OPERATORS = sorted("""
++ -- && || == != <= >= += -= *= /= %= &= |= ^=
+ - * / % < > ! ~ & | ^ = ? : ; , . ( ) { } [ ]
""".split(), key=len, reverse=True)


@dataclass(frozen=True)
class Token:
    kind: str  # ident, keyword, int, float, char, string, op, eof
    text: str
    offset: int
    line: int
    column: int


_SPEC = [
    ("ws", r"[ \t\r\n\f]+"),
    ("comment", r"//[^\n]*|/\*[\s\S]*?\*/"),
    ("float", r"(?:\d+\.\d*|\.\d+)(?:[eE][+-]?\d+)?[fFdD]?|\d+[eE][+-]?\d+[fFdD]?|\d+[fFdD]"),
    ("int", r"0[xX][0-9a-fA-F]+[lL]?|\d+[lL]?"),
    ("char", r"'(?:\\.|[^'\\\n])+'"),
    ("string", r'"(?:\\.|[^"\\\n])*"'),
    ("ident", r"[A-Za-z_$][A-Za-z0-9_$]*"),
    ("op", "|".join(re.escape(op) for op in OPERATORS)),
]
_RX = re.compile("|".join(f"(?P<{name}>{rx})" for name, rx in _SPEC))


def tokenize(text: str) -> list[Token]:
    out: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _RX.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            if kind == "ident" and lexeme in KEYWORDS:
                kind = "keyword"
            out.append(Token(kind, lexeme, pos, line, pos - line_start + 1))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            line_start = pos + lexeme.rindex("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", n, line, n - line_start + 1))
    return out


def lex_tokens(text: str) -> list[str]:
    """Lexemes of ``text`` without positions."""
    return [t.text for t in tokenize(text) if t.kind != "eof"]
