"""MiniScript lexing, parsing and label indexing."""

from .labels import LabelIndex, capture_key, index_labels, normalize_label, resolve_site
from .lexer import Token, tokenize
from .nodes import FunctionDef, Program
from .parser import parse


def parse_source(source_text, path="<string>"):
    """Tokenize, parse and index ``source_text``; returns ``(program, labels)``."""
    tokens = tokenize(source_text)
    program = parse(tokens, path)
    return program, index_labels(source_text, program, tokens)


__all__ = [
    "FunctionDef", "LabelIndex", "Program", "Token", "capture_key", "index_labels",
    "normalize_label", "parse", "parse_source", "resolve_site", "tokenize",
]
