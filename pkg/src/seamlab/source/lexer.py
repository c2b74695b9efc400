"""Tokenizer for MiniScript (``.ms``) source text."""

import re
from dataclasses import dataclass

from ..errors import LexError

KEYWORDS = frozenset({
    "function", "end", "for", "while", "if", "elseif", "else",
    "try", "catch", "return",
})

# Longest operators first so that "<=" wins over "<".
OPERATORS = ("==", "~=", "<=", ">=", "&&", "||",
             "+", "-", "*", "/", "^", "<", ">", "~", "=", ":", "@", ".")
PUNCTUATION = "()[],;"

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_SPACE = re.compile(r"[ \t\f\v]+")
_CONTINUATION = re.compile(r"\.\.\.[^\r\n]*(?:\r\n|\n|$)")


@dataclass(frozen=True)
class Token:
    kind: str  # keyword identifier number string operator punctuation newline comment
    lexeme: str
    line: int
    column: int

    @property
    def value(self):
        """Decoded payload: float for numbers, unescaped text for strings."""
        if self.kind == "number":
            return float(self.lexeme)
        if self.kind == "string":
            return self.lexeme[1:-1].replace("''", "'")
        return self.lexeme

    def __repr__(self):
        return f"{self.kind}({self.lexeme!r})@{self.line}:{self.column}"


def tokenize(source_text):
    """Split ``source_text`` into tokens.

    Whitespace and ``...`` continuations are skipped; everything else,
    comments and newlines included, becomes a token.
    """
    tokens = []
    pos = 0
    line = 1
    line_start = 0
    n = len(source_text)
    while pos < n:
        ch = source_text[pos]
        col = pos - line_start + 1

        m = _SPACE.match(source_text, pos)
        if m:
            pos = m.end()
            continue

        if ch == "\r" and source_text.startswith("\r\n", pos):
            tokens.append(Token("newline", "\r\n", line, col))
            pos += 2
            line += 1
            line_start = pos
            continue
        if ch == "\n":
            tokens.append(Token("newline", "\n", line, col))
            pos += 1
            line += 1
            line_start = pos
            continue

        if ch == "%":
            end = pos
            while end < n and source_text[end] not in "\r\n":
                end += 1
            tokens.append(Token("comment", source_text[pos:end], line, col))
            pos = end
            continue

        m = _CONTINUATION.match(source_text, pos)
        if m:
            pos = m.end()
            if m.group().endswith("\n"):
                line += 1
                line_start = pos
            continue

        m = _NUMBER.match(source_text, pos)
        if m and (ch.isdigit() or ch == "."):
            tokens.append(Token("number", m.group(), line, col))
            pos = m.end()
            continue

        m = _IDENT.match(source_text, pos)
        if m:
            word = m.group()
            kind = "keyword" if word in KEYWORDS else "identifier"
            tokens.append(Token(kind, word, line, col))
            pos = m.end()
            continue

        if ch == "'":
            end = pos + 1
            while True:
                if end >= n or source_text[end] in "\r\n":
                    raise LexError("unterminated string literal", line, col)
                if source_text[end] == "'":
                    if source_text.startswith("''", end):
                        end += 2
                        continue
                    break
                end += 1
            tokens.append(Token("string", source_text[pos:end + 1], line, col))
            pos = end + 1
            continue

        for op in OPERATORS:
            if source_text.startswith(op, pos):
                tokens.append(Token("operator", op, line, col))
                pos += len(op)
                break
        else:
            if ch in PUNCTUATION:
                tokens.append(Token("punctuation", ch, line, col))
                pos += 1
                continue
            raise LexError(f"illegal character {ch!r}", line, col)
    return tokens
