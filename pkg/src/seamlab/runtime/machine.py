"""Tree-walking interpreter with a per-line hook engine.

Every line-leading statement is preceded by a call into the Machine's
injection registry, which answers with a :class:`HookOutcome`.  The
registry is the only place injected behavior enters; with an empty
registry (or ``hooks_enabled=False``) execution is plain interpretation.
"""

import itertools
import sys
from collections import ChainMap
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from ..errors import (ArityError, ResolutionError, RecursionLimitError, RefClearedVarError,
                      ScriptRuntimeError, ScriptTypeError, UndefinedVariableError,
                      UnknownFunctionError, UnsetOutputError)
from ..source import nodes as n
from ..source import parse, parse_source, tokenize
from . import ops
from .builtins import CORE_BUILTINS
from .values import UNSET, Closure, Handle, kind_of, to_value, truthy

RETURN_MODES = ("native", "fidelity")


@dataclass
class Config:
    halt_on_injection_error: bool = False
    cache_dir: Path = Path(".seamcache")
    # "native": returnat yields HookOutcome.return_now.
    # "fidelity": returnat clears the workspace and the next variable read returns.
    return_mode: str = "native"
    hooks_enabled: bool = True
    trace: bool = False
    max_depth: int = 1000


@dataclass(frozen=True)
class HookOutcome:
    kind: str  # continue | jump | return_now | halt
    line: Optional[int] = None
    error: Optional[Exception] = None

    @classmethod
    def jump(cls, line):
        return cls("jump", line=line)

    @classmethod
    def halt(cls, error):
        return cls("halt", error=error)


HookOutcome.CONTINUE = HookOutcome("continue")
HookOutcome.RETURN_NOW = HookOutcome("return_now")


@dataclass(eq=False)
class Frame:
    function: str
    program: n.Program
    fndef: n.FunctionDef
    workspace: dict = field(default_factory=dict)
    current_line: int = 0
    output_names: list = field(default_factory=list)
    cleared: bool = False
    friend: bool = False
    id: int = 0
    pending_return: bool = False
    stashed_outputs: Optional[list] = None

    @property
    def file(self):
        return self.program.name


@dataclass
class CallResult:
    values: list
    frame: Frame


class _Return(Exception):
    """Unwinds the current frame (``return`` statement or injected return)."""


class Machine:
    """Loaded programs plus everything a run mutates.

    Two Machines share no mutable state.  A Machine must not be used from
    two threads at once.
    """

    def __init__(self, config=None, **overrides):
        from ..injection import CaptureStore, Registry

        self.config = replace(config or Config(), **overrides)
        if self.config.return_mode not in RETURN_MODES:
            raise ValueError(f"return_mode must be one of {RETURN_MODES}")
        self.programs = {}
        self.labels = {}
        self.sources = {}
        self.registry = Registry()
        self.captures = CaptureStore()
        self.diagnostics = []
        self.output = []
        self.trace = []
        self.builtins = dict(CORE_BUILTINS)
        self.echo = None
        self._depth = 0
        self._ids = itertools.count(1)
        from ..injection import KEY_FUNCTION_BUILTINS
        self.builtins.update(KEY_FUNCTION_BUILTINS)

    # -- loading ----------------------------------------------------------------

    def load(self, path):
        path = Path(path)
        return self.load_text(path.read_text(encoding="utf-8"), str(path))

    def load_text(self, source_text, path="<string>"):
        program, labels = parse_source(source_text, path)
        name = program.name
        if name in self.programs:
            self.diagnostics.append(f"reloaded '{name}' from {path}")
        self.programs[name] = program
        self.labels[name] = labels
        self.sources[name] = source_text
        return program

    def find_function(self, name, from_program=None, friend=True):
        """Locate ``name`` as ``(program, FunctionDef)`` or return None.

        Order: functions of ``from_program`` (subfunctions included), entry
        functions of loaded files, then, for friends, any subfunction.
        """
        if from_program is not None and from_program.kind == "function-file":
            fn = from_program.function(name)
            if fn is not None:
                return from_program, fn
        program = self.programs.get(name)
        if program is not None and program.kind == "function-file":
            return program, program.entry
        if friend:
            for program in self.programs.values():
                if program.kind == "function-file":
                    fn = program.function(name)
                    if fn is not None:
                        return program, fn
        return None

    def site_program(self, function):
        """Program holding ``function`` (entry, subfunction or script name)."""
        found = self.find_function(function)
        if found is not None:
            return found[0]
        program = self.programs.get(function)
        if program is not None:
            return program
        raise UnknownFunctionError(function)

    def is_known(self, function):
        try:
            self.site_program(function)
        except UnknownFunctionError:
            return False
        return True

    # -- public execution API ---------------------------------------------------

    def call(self, function, args=()):
        return self.invoke(function, args).values

    def invoke(self, function, args=()):
        found = self.find_function(function)
        if found is None:
            raise UnknownFunctionError(function)
        program, fndef = found
        values = [to_value(a) for a in args]
        return self._top(lambda: self._invoke(program, fndef, values))

    def run_script(self, name, friend=False):
        """Execute a loaded script in a fresh frame; returns the frame."""
        program = self.programs.get(name)
        if program is None:
            raise UnknownFunctionError(name)
        return self._top(lambda: self._invoke(program, program.entry, [], friend=friend)).frame

    def emit(self, line):
        self.output.append(line)
        if self.echo is not None:
            self.echo(line)

    def eval_in_frame(self, frame, code):
        """Evaluate a closure or code text with access to ``frame``'s workspace.

        Text may hold statements; assignments write into the frame.  The
        value of a trailing expression statement is returned.
        """
        if isinstance(code, Closure):
            return self._first_or_none(self._call_closure(code, [], frame, 0, in_frame=frame))
        tokens = tokenize(code)
        program = parse(tokens, "<eval>")
        if program.kind != "script":
            raise ScriptRuntimeError("function definitions cannot be evaluated in a frame")
        body = program.script_body
        for stmt in n.walk(body):
            stmt.line = frame.current_line
        if body and isinstance(body[-1], n.ExprStmt):
            for stmt in body[:-1]:
                self._exec(stmt, frame)
            try:
                return self._first_or_none(self._call_expr(body[-1].expr, frame, 0))
            except ScriptRuntimeError as exc:
                raise exc.locate(frame.function, frame.current_line)
        for stmt in body:
            self._exec(stmt, frame)
        return None

    def assign_in_frame(self, frame, name, value):
        frame.workspace[name] = value

    def clear_frame(self, frame):
        frame.workspace.clear()
        frame.cleared = True

    # -- engine internals -------------------------------------------------------

    def _top(self, thunk):
        needed = self.config.max_depth * 12 + 1000
        if sys.getrecursionlimit() < needed:
            sys.setrecursionlimit(needed)
        return thunk()

    @staticmethod
    def _first_or_none(values):
        return values[0] if values else None

    def _invoke(self, program, fndef, args, friend=False):
        if len(args) > len(fndef.params):
            raise ScriptRuntimeError(
                f"too many input arguments to '{fndef.name}' "
                f"({len(args)} given, {len(fndef.params)} accepted)")
        if self._depth >= self.config.max_depth:
            raise RecursionLimitError(
                f"maximum call depth {self.config.max_depth} exceeded calling '{fndef.name}'")
        frame = Frame(fndef.name, program, fndef, dict(zip(fndef.params, args)),
                      current_line=fndef.line_span[0], output_names=list(fndef.outputs),
                      friend=friend, id=next(self._ids))
        self._depth += 1
        try:
            self._run_body(frame)
        except _Return:
            pass
        except RefClearedVarError as exc:
            if not (exc.frame is frame and frame.pending_return):
                raise
            self.diagnostics.append(exc.render())
        finally:
            self._depth -= 1
        if frame.pending_return and frame.stashed_outputs is not None:
            values = list(frame.stashed_outputs)
        elif frame.cleared:
            values = [UNSET] * len(frame.output_names)
        else:
            values = [frame.workspace.get(o, UNSET) for o in frame.output_names]
        return CallResult(values, frame)

    def _run_body(self, frame):
        body = frame.fndef.body
        start = 0
        if self.config.hooks_enabled and self.registry:
            outcome = self.registry.on_entry(self, frame)
            if outcome.kind == "jump":
                start = frame.fndef.top_level[outcome.line]
            elif outcome.kind == "halt":
                raise outcome.error
        for stmt in body[start:]:
            self._exec(stmt, frame)

    def _hook(self, stmt, frame):
        frame.current_line = stmt.line
        outcome = self.registry.on_line(self, frame, stmt.line)
        if outcome.kind == "return_now":
            raise _Return()
        if outcome.kind == "halt":
            raise outcome.error

    def _exec(self, stmt, frame):
        # a frame that has logically returned (fidelity mode) fires no more hooks
        if stmt.leads and self.config.hooks_enabled and self.registry \
                and not frame.pending_return:
            self._hook(stmt, frame)
        frame.current_line = stmt.line
        if self.config.trace:
            self.trace.append((frame.id, frame.function, stmt.line, type(stmt).__name__))
        try:
            self._dispatch(stmt, frame)
        except ScriptRuntimeError as exc:
            raise exc.locate(frame.function, stmt.line)
        except (ResolutionError, ArityError) as exc:
            raise _wrap(exc).locate(frame.function, stmt.line) from exc

    def _block(self, body, frame):
        for stmt in body:
            self._exec(stmt, frame)

    def _dispatch(self, stmt, frame):
        if isinstance(stmt, n.Assign):
            value = self._eval(stmt.value, frame)
            if stmt.index is None:
                frame.workspace[stmt.target] = value
            else:
                current = self._read_var(frame, stmt.target, missing_ok=True)
                args = [self._eval(a, frame) for a in stmt.index]
                frame.workspace[stmt.target] = ops.assign_index(current, args, value)
        elif isinstance(stmt, n.ExprStmt):
            self._call_expr(stmt.expr, frame, 0)
        elif isinstance(stmt, n.For):
            iterable = self._eval(stmt.iterable, frame)
            if isinstance(iterable, tuple):
                items = iterable
            elif isinstance(iterable, (float, bool)):
                items = (iterable,)
            else:
                raise ScriptTypeError(f"cannot iterate over a {kind_of(iterable)}")
            if not items:
                frame.workspace[stmt.var] = ()
            for item in items:
                frame.workspace[stmt.var] = item
                self._block(stmt.body, frame)
        elif isinstance(stmt, n.While):
            while truthy(self._eval(stmt.cond, frame)):
                self._block(stmt.body, frame)
        elif isinstance(stmt, n.If):
            for cond, body in stmt.branches:
                if truthy(self._eval(cond, frame)):
                    self._block(body, frame)
                    return
            if stmt.else_body is not None:
                self._block(stmt.else_body, frame)
        elif isinstance(stmt, n.Try):
            try:
                self._block(stmt.body, frame)
            except ScriptRuntimeError as exc:
                if stmt.catch_var is not None:
                    frame.workspace[stmt.catch_var] = {
                        "message": exc.message, "identifier": exc.kind}
                self._block(stmt.catch_body, frame)
        elif isinstance(stmt, n.Return):
            raise _Return()
        elif isinstance(stmt, n.MultiAssign):
            values = self._call_expr(stmt.value, frame, len(stmt.targets))
            if len(values) < len(stmt.targets):
                raise ScriptRuntimeError("too many output arguments requested")
            for name, value in zip(stmt.targets, values):
                if value is UNSET:
                    raise UnsetOutputError(f"output for '{name}' was not set by the callee")
                frame.workspace[name] = value
        else:  # pragma: no cover
            raise TypeError(f"unknown statement {stmt!r}")

    # -- expressions ------------------------------------------------------------

    def _read_var(self, frame, name, missing_ok=False):
        if frame.cleared:
            raise RefClearedVarError(frame.function, frame.current_line, frame)
        try:
            return frame.workspace[name]
        except KeyError:
            if missing_ok:
                return None
            raise UndefinedVariableError(f"Undefined variable '{name}'.")

    def _lookup(self, frame, name):
        """Classify ``name`` as ``('var', value)``, ``('function', found)`` or ``('builtin', fn)``."""
        if not frame.cleared and name in frame.workspace:
            return "var", frame.workspace[name]
        found = self.find_function(name, frame.program, frame.friend)
        if found is not None:
            return "function", found
        if name in self.builtins:
            return "builtin", self.builtins[name]
        if frame.cleared:
            raise RefClearedVarError(frame.function, frame.current_line, frame)
        raise UndefinedVariableError(f"Undefined function or variable '{name}'.")

    def _eval(self, node, frame):
        """Evaluate ``node`` to exactly one value."""
        if isinstance(node, (n.Name, n.Apply)):
            values = self._call_expr(node, frame, 1)
            if not values or values[0] is UNSET or values[0] is None:
                what = node.name if isinstance(node, n.Name) else _describe(node.target)
                raise UnsetOutputError(f"'{what}' did not produce a value")
            return values[0]
        if isinstance(node, n.Number):
            return node.value
        if isinstance(node, n.String):
            return node.value
        if isinstance(node, n.Binary):
            if node.op in ("&&", "||"):
                left = truthy(self._eval(node.left, frame))
                if node.op == "&&" and not left:
                    return False
                if node.op == "||" and left:
                    return True
                return truthy(self._eval(node.right, frame))
            return ops.binary(node.op, self._eval(node.left, frame), self._eval(node.right, frame))
        if isinstance(node, n.Unary):
            return ops.unary(node.op, self._eval(node.operand, frame))
        if isinstance(node, n.Range):
            start = self._eval(node.start, frame)
            step = self._eval(node.step, frame) if node.step is not None else 1.0
            return ops.make_range(start, step, self._eval(node.stop, frame))
        if isinstance(node, n.ArrayLit):
            return ops.concat([self._eval(e, frame) for e in node.elements])
        if isinstance(node, n.Field):
            target = self._eval(node.target, frame)
            if not isinstance(target, dict):
                raise ScriptTypeError(f"field access on a {kind_of(target)}")
            if node.name not in target:
                raise ScriptRuntimeError(f"Reference to non-existent field '{node.name}'.")
            return target[node.name]
        if isinstance(node, n.Lambda):
            env = {} if frame.cleared else dict(frame.workspace)
            return Closure(node.params, node.body, node.text, env, frame.program, frame.friend)
        if isinstance(node, n.HandleRef):
            return Handle(node.name, frame.program, frame.friend)
        raise TypeError(f"unknown expression {node!r}")  # pragma: no cover

    def _call_expr(self, node, frame, nargout):
        """Evaluate a possibly-calling expression; returns a list of values.

        ``nargout=0`` means the caller does not need a value (statement
        context); functions then return their first output if it is set.
        """
        if isinstance(node, n.Name):
            kind, obj = self._lookup(frame, node.name)
            if kind == "var":
                return [obj]
            return self._call_resolved(kind, obj, [], frame, nargout)
        if isinstance(node, n.Apply):
            if isinstance(node.target, n.Name):
                kind, obj = self._lookup(frame, node.target.name)
            else:
                kind, obj = "var", self._eval(node.target, frame)
            args = [self._eval(a, frame) for a in node.args]
            if kind == "var":
                if isinstance(obj, (Closure, Handle)):
                    return self._call_value(obj, args, frame, nargout)
                return [ops.index(obj, args)]
            return self._call_resolved(kind, obj, args, frame, nargout)
        return [self._eval(node, frame)]

    def _call_resolved(self, kind, obj, args, frame, nargout):
        if kind == "builtin":
            result = obj(self, frame, args)
            return [] if result is None else [result]
        program, fndef = obj
        if nargout > max(len(fndef.outputs), 1) or (nargout == 1 and not fndef.outputs):
            raise ScriptRuntimeError(f"too many output arguments for '{fndef.name}'")
        values = self._invoke(program, fndef, args).values
        if nargout == 0:
            return values[:1] if values and values[0] is not UNSET else []
        return values

    def _call_value(self, value, args, frame, nargout):
        if isinstance(value, Closure):
            return self._call_closure(value, args, frame, nargout)
        found = self.find_function(value.name, value.program, value.friend)
        if found is not None:
            return self._call_resolved("function", found, args, frame, nargout)
        if value.name in self.builtins:
            return self._call_resolved("builtin", self.builtins[value.name], args, frame, nargout)
        raise UndefinedVariableError(f"Undefined function '{value.name}'.")

    def _call_closure(self, closure, args, frame, nargout, in_frame=None):
        if len(args) > len(closure.params):
            raise ScriptRuntimeError("too many input arguments to anonymous function")
        bound = dict(zip(closure.params, args))
        if in_frame is not None:
            workspace = ChainMap(in_frame.workspace, bound, closure.env)
            fndef = in_frame.fndef
        else:
            workspace = ChainMap(bound, dict(closure.env))
            fndef = frame.fndef
        program = closure.program if closure.program is not None else frame.program
        scope = Frame(frame.function, program, fndef, workspace,
                      current_line=frame.current_line,
                      cleared=in_frame.cleared if in_frame is not None else False,
                      friend=closure.friend, id=frame.id)
        if isinstance(closure.body, (n.Name, n.Apply)):
            return self._call_expr(closure.body, scope, nargout)
        return [self._eval(closure.body, scope)]


def _describe(node):
    if isinstance(node, n.Name):
        return node.name
    return "expression"


def _wrap(exc):
    """Turn a host-level error raised by a builtin into a catchable script error."""
    err = ScriptRuntimeError(str(exc))
    err.kind = type(exc).__name__
    return err


__all__ = ["CallResult", "Config", "Frame", "HookOutcome", "Machine"]
