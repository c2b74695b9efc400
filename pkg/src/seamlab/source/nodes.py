"""Syntax tree for MiniScript programs."""

from dataclasses import dataclass, field
from pathlib import PurePath
from typing import Optional


# -- expressions --------------------------------------------------------------

@dataclass
class Expr:
    line: int
    column: int


@dataclass
class Number(Expr):
    value: float


@dataclass
class String(Expr):
    value: str


@dataclass
class Name(Expr):
    name: str


@dataclass
class ArrayLit(Expr):
    elements: list


@dataclass
class Range(Expr):
    start: Expr
    step: Optional[Expr]
    stop: Expr


@dataclass
class Binary(Expr):
    op: str
    left: Expr
    right: Expr


@dataclass
class Unary(Expr):
    op: str
    operand: Expr


@dataclass
class Apply(Expr):
    """``target(args)``: a call or an index, decided at run time."""

    target: Expr
    args: list


@dataclass
class Field(Expr):
    target: Expr
    name: str


@dataclass
class Lambda(Expr):
    params: list
    body: Expr
    text: str


@dataclass
class HandleRef(Expr):
    name: str


# -- statements ---------------------------------------------------------------

@dataclass
class Stmt:
    line: int
    column: int
    # True for the lexically first statement on its source line; only these
    # statements trigger line hooks.
    leads: bool = field(default=False, init=False, compare=False)


@dataclass
class Assign(Stmt):
    target: str
    index: Optional[list]  # None for a plain name, else the index arguments
    value: Expr


@dataclass
class MultiAssign(Stmt):
    targets: list
    value: Expr


@dataclass
class ExprStmt(Stmt):
    expr: Expr


@dataclass
class For(Stmt):
    var: str
    iterable: Expr
    body: list


@dataclass
class While(Stmt):
    cond: Expr
    body: list


@dataclass
class If(Stmt):
    branches: list  # [(cond, body), ...]
    else_body: Optional[list]


@dataclass
class Try(Stmt):
    body: list
    catch_var: Optional[str]
    catch_body: list


@dataclass
class Return(Stmt):
    pass


def child_blocks(stmt):
    """Nested statement lists of ``stmt`` in lexical order."""
    if isinstance(stmt, (For, While)):
        return [stmt.body]
    if isinstance(stmt, If):
        blocks = [body for _, body in stmt.branches]
        if stmt.else_body is not None:
            blocks.append(stmt.else_body)
        return blocks
    if isinstance(stmt, Try):
        return [stmt.body, stmt.catch_body]
    return []


def walk(body):
    """Yield every statement of ``body`` in lexical (pre-)order."""
    for stmt in body:
        yield stmt
        for block in child_blocks(stmt):
            yield from walk(block)


# -- program units ------------------------------------------------------------

@dataclass
class FunctionDef:
    name: str
    params: list
    outputs: list
    body: list
    line_span: tuple

    def __post_init__(self):
        seen = set()
        for stmt in walk(self.body):
            stmt.leads = stmt.line not in seen
            seen.add(stmt.line)
        self.statement_lines = sorted(seen)
        self.top_level = {s.line: i for i, s in enumerate(self.body) if s.leads}

    def contains_line(self, line):
        return self.line_span[0] <= line <= self.line_span[1]

    def fire_line(self, line):
        """First hookable line at or after ``line``, or None past the last one."""
        for candidate in self.statement_lines:
            if candidate >= line:
                return candidate
        return None


@dataclass
class Program:
    kind: str  # "script" | "function-file"
    functions: list
    script_body: list
    source_path: str
    last_line: int = 1

    @property
    def name(self):
        """Entry-function name, or the file stem for scripts."""
        if self.kind == "function-file":
            return self.functions[0].name
        return PurePath(self.source_path).stem or "script"

    @property
    def entry(self):
        """The FunctionDef the program runs as (scripts get a synthetic one)."""
        if self.kind == "function-file":
            return self.functions[0]
        try:
            return self._script_def
        except AttributeError:
            self._script_def = FunctionDef(
                self.name, [], [], self.script_body, (1, self.last_line))
            return self._script_def

    def function(self, name):
        for fn in self.functions:
            if fn.name == name:
                return fn
        if self.kind == "script" and name == self.name:
            return self.entry
        return None

    def all_functions(self):
        return list(self.functions) if self.kind == "function-file" else [self.entry]
