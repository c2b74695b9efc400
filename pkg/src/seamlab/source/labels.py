"""Comment labels (``% <NAME:NUM>``) and injection-site resolution."""

import re
from dataclasses import dataclass, field

from ..errors import (DuplicateLabelError, LabelPlacementError, LineOutOfRangeError,
                      UnknownFunctionError, UnknownLabelError)
from .lexer import tokenize

LABEL_RE = re.compile(r"<([A-Za-z_][A-Za-z0-9_]*:[0-9]+)>")


@dataclass
class LabelIndex:
    entries: dict = field(default_factory=dict)  # "FOO:1" -> (function, line)

    def __contains__(self, label):
        return normalize_label(label) in self.entries

    def __getitem__(self, label):
        return self.entries[normalize_label(label)]

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def items(self):
        return self.entries.items()


def normalize_label(text):
    """``'<FOO:1>'`` and ``'FOO:1'`` both become ``'FOO:1'``."""
    text = text.strip()
    if text.startswith("<") and text.endswith(">"):
        text = text[1:-1]
    return text


def capture_key(selector):
    """Record field name for captures at ``selector``: FOO:2 -> FOO2, 7 -> L7."""
    if isinstance(selector, str):
        return normalize_label(selector).replace(":", "")
    return f"L{int(selector)}"


def index_labels(source_text, program, tokens=None):
    """Map every ``<NAME:NUM>`` found in a comment to its line and function."""
    if tokens is None:
        tokens = tokenize(source_text)
    functions = program.all_functions()
    index = LabelIndex()
    for tok in tokens:
        if tok.kind != "comment":
            continue
        for match in LABEL_RE.finditer(tok.lexeme):
            label = match.group(1)
            if label in index.entries:
                raise DuplicateLabelError(label, index.entries[label][1], tok.line,
                                          program.source_path)
            owner = next((fn for fn in functions if fn.contains_line(tok.line)), None)
            if owner is None:
                raise LabelPlacementError(f"label <{label}> is outside every function",
                                          tok.line, tok.column, program.source_path)
            index.entries[label] = (owner.name, tok.line)
    return index


def resolve_site(index, program, function, selector):
    """Resolve a label text or line number to ``(function, line)``.

    Numeric selectors are file line numbers and must fall inside the
    function's line span.
    """
    fn = program.function(function)
    if fn is None:
        raise UnknownFunctionError(function)
    if isinstance(selector, str):
        label = normalize_label(selector)
        if label not in index.entries:
            raise UnknownLabelError(label)
        owner, line = index.entries[label]
        if owner != function:
            raise UnknownLabelError(label, function)
        return function, line
    line = int(selector)
    if not fn.contains_line(line):
        raise LineOutOfRangeError(function, line, fn.line_span)
    return function, line
