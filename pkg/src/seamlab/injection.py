"""The key functions: gotoat, assignat, captureat, returnat, evalat, clearat.

Each ``...at`` registration takes the listing-style argument convention: a
function name, then name/value pairs where ``'at', selector`` picks the
site.  Selectors are label text (``'<FOO:1>'``) or file line numbers.

Injected actions fire when control reaches the first executable line at
or after the site, strictly before that line's own code.  At a shared
line they apply in the fixed order assign, eval, capture, return.
"""

import inspect
from dataclasses import dataclass

from .errors import (ArityError, BreakpointHitError, CaptureMissError, HaltError,
                     InjectionError, JumpTargetError, RefClearedVarError, ScriptRuntimeError,
                     ScriptTypeError, SeamError, UnknownFunctionError)
from .runtime.machine import HookOutcome
from .runtime.values import UNSET, Closure, kind_of, to_value, truthy
from .source import capture_key, resolve_site

KIND_ORDER = ("assign", "eval", "capture", "return")


@dataclass
class InjectionPoint:
    site: tuple  # (function, line) as resolved from the selector
    kind: str  # assign | eval | capture | return | goto
    payload: object
    fire_line: object  # first statement line at or after the site (None: never)
    key: object = None  # capture-record key
    hit_count: int = 0


class CaptureStore:
    """Captured values by key; last write wins, retrieval drains."""

    def __init__(self):
        self.entries = {}

    def put(self, key, value):
        self.entries[key] = value

    def drain(self):
        out, self.entries = self.entries, {}
        return out

    def clear(self):
        self.entries.clear()

    def __len__(self):
        return len(self.entries)


class Registry:
    """Injection points of one Machine, at most one per (site, kind)."""

    def __init__(self):
        self.points = {}
        self._by_line = {}
        self._gotos = {}

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(self.points.values())

    def add(self, point):
        function, line = point.site
        self.points[(function, line, point.kind)] = point
        self._reindex()

    def clear(self, function=None):
        if function is None:
            self.points.clear()
        else:
            self.points = {k: p for k, p in self.points.items() if k[0] != function}
        self._reindex()

    def _reindex(self):
        self._by_line = {}
        self._gotos = {}
        for point in self.points.values():
            function = point.site[0]
            if point.kind == "goto":
                self._gotos[function] = point
            elif point.fire_line is not None:
                self._by_line.setdefault((function, point.fire_line), []).append(point)
        for points in self._by_line.values():
            points.sort(key=lambda p: KIND_ORDER.index(p.kind))

    def find(self, function, kind):
        return [p for p in self.points.values() if p.site[0] == function and p.kind == kind]

    # -- hook protocol ----------------------------------------------------------

    def on_entry(self, machine, frame):
        point = self._gotos.get(frame.function)
        if point is None:
            return HookOutcome.CONTINUE
        point.hit_count += 1
        return HookOutcome.jump(point.payload)

    def on_line(self, machine, frame, line):
        points = self._by_line.get((frame.function, line))
        if not points:
            return HookOutcome.CONTINUE
        for point in list(points):
            point.hit_count += 1
            outcome = _APPLY[point.kind](machine, frame, line, point)
            if outcome is not HookOutcome.CONTINUE:
                return outcome
        return HookOutcome.CONTINUE


# -- applying points ---------------------------------------------------------

def _injection_failed(machine, frame, line, exc):
    if isinstance(exc, ScriptRuntimeError):
        exc.locate(frame.function, line)
        kind, message = exc.kind, exc.message
    else:
        kind, message = type(exc).__name__, str(exc)
    machine.diagnostics.append(
        f"injected code failed in {frame.function} at line {line}: {kind}: {message}")
    if machine.config.halt_on_injection_error:
        return HookOutcome.halt(InjectionError(exc, frame.function, line))
    return HookOutcome.CONTINUE


def _apply_assign(machine, frame, line, point):
    for name, value in point.payload:
        machine.assign_in_frame(frame, name, value)
    return HookOutcome.CONTINUE


def _apply_eval(machine, frame, line, point):
    try:
        result = machine.eval_in_frame(frame, point.payload)
        stop = result is not None and result is not UNSET and truthy(result)
    except HaltError:
        raise
    except SeamError as exc:
        return _injection_failed(machine, frame, line, exc)
    if stop:
        return HookOutcome.halt(BreakpointHitError(frame.function, line))
    return HookOutcome.CONTINUE


def _apply_capture(machine, frame, line, point):
    name = point.payload
    if name is None:
        value = {k: v for k, v in frame.workspace.items() if v is not UNSET}
    elif frame.cleared:
        return _injection_failed(machine, frame, line,
                                 RefClearedVarError(frame.function, line, frame))
    elif name not in frame.workspace:
        return _injection_failed(machine, frame, line, CaptureMissError(
            f"variable '{name}' is not in the workspace of '{frame.function}'"))
    else:
        value = frame.workspace[name]
    machine.captures.put(point.key, value)
    return HookOutcome.CONTINUE


def _apply_return(machine, frame, line, point):
    if machine.config.return_mode == "native":
        return HookOutcome.RETURN_NOW
    frame.stashed_outputs = [frame.workspace.get(o, UNSET) for o in frame.output_names]
    frame.pending_return = True
    machine.clear_frame(frame)
    return HookOutcome.CONTINUE


_APPLY = {
    "assign": _apply_assign,
    "eval": _apply_eval,
    "capture": _apply_capture,
    "return": _apply_return,
}


# -- registration API --------------------------------------------------------

def _function_def(machine, fun):
    if not isinstance(fun, str):
        raise ScriptTypeError(f"function name must be a string, got a {kind_of(fun)}")
    program = machine.site_program(fun)
    return program, program.function(fun)


def _options(args, allowed):
    if len(args) % 2:
        raise ArityError(f"name/value arguments must come in pairs, got {len(args)} value(s)")
    pairs = []
    for i in range(0, len(args), 2):
        key = args[i]
        if not isinstance(key, str):
            raise ArityError(f"argument {i + 2} must be an option name string")
        if allowed is not None and key not in allowed:
            raise ArityError(f"unknown option '{key}'")
        pairs.append((key, args[i + 1]))
    return pairs


def _selector(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool) \
            and float(value).is_integer():
        return int(value)
    raise ArityError(f"site selector must be a label or a line number, got {value!r}")


def _site(machine, fun, selector):
    program, fndef = _function_def(machine, fun)
    function, line = resolve_site(machine.labels[program.name], program, fun, _selector(selector))
    return fndef, (function, line)


def _register(machine, fun, selector, kind, payload, key=None):
    fndef, site = _site(machine, fun, selector)
    point = InjectionPoint(site, kind, payload, fndef.fire_line(site[1]), key)
    machine.registry.add(point)
    return point


def gotoat(machine, fun, *args):
    """On every entry to ``fun`` continue at the target line.

    ``gotoat(m, 'foo', 'goto', '<FOO:1>')``.  The target must be a
    top-level statement of ``fun``; statements before it do not run.
    """
    pairs = _options(args, {"goto"})
    if len(pairs) != 1:
        raise ArityError("gotoat expects exactly one 'goto', target pair")
    fndef, (function, line) = _site(machine, fun, pairs[0][1])
    target = fndef.fire_line(line)
    if target is None or target not in fndef.top_level:
        raise JumpTargetError(
            f"line {line} of '{function}' is not a top-level statement; "
            "jumps may only target statements outside any block")
    entry = fndef.body[0].line if fndef.body else fndef.line_span[0]
    point = InjectionPoint((function, entry), "goto", target, entry)
    machine.registry.add(point)
    return point


def assignat(machine, fun, *args):
    """Assign the given variables each time control reaches the site."""
    pairs = _options(args, None)
    selector = None
    assignments = []
    for name, value in pairs:
        if name == "at":
            selector = value
        else:
            assignments.append((name, to_value(value)))
    if selector is None:
        raise ArityError("assignat requires an 'at' selector")
    if not assignments:
        raise ArityError("assignat requires at least one name/value pair")
    return _register(machine, fun, selector, "assign", assignments)


def captureat(machine, fun=None, *args):
    """Register a capture, or with no ``fun`` drain and return the captures.

    ``captureat(m, 'foo', 'at', '<FOO:2>', 'var', 'sum')`` stores ``sum``;
    without ``'var'`` the whole workspace is stored as a record.
    """
    if fun is None:
        if args:
            raise ArityError("captureat retrieval takes no arguments")
        return machine.captures.drain()
    options = dict(_options(args, {"at", "var"}))
    if "at" not in options:
        raise ArityError("captureat requires an 'at' selector")
    var = options.get("var")
    if var is not None and not isinstance(var, str):
        raise ArityError("'var' must name a variable")
    selector = _selector(options["at"])
    return _register(machine, fun, selector, "capture", var, capture_key(selector))


def returnat(machine, fun, *args):
    """Return from ``fun`` when control reaches the site, before that line runs.

    The short form ``returnat(m, 'spy', 42)`` is accepted as well.
    """
    if len(args) == 1:
        args = ("at",) + args
    options = dict(_options(args, {"at"}))
    if "at" not in options:
        raise ArityError("returnat requires an 'at' selector")
    return _register(machine, fun, options["at"], "return", None)


def evalat(machine, fun, selector, callback):
    """Evaluate ``callback`` in the live frame each time the site is reached.

    ``callback`` is a zero-parameter closure or code text.  A truthy result
    stops the run with :class:`BreakpointHitError`.
    """
    if isinstance(callback, Closure):
        if callback.params:
            raise ArityError("evalat callbacks take no parameters")
    elif not isinstance(callback, str):
        raise ArityError(f"evalat callback must be a closure or code text, got {callback!r}")
    return _register(machine, fun, selector, "eval", callback)


def clearat(machine, fun=None):
    """Remove the injection points of ``fun``, or all of them."""
    if fun is not None:
        if not isinstance(fun, str):
            raise ScriptTypeError(f"function name must be a string, got a {kind_of(fun)}")
        if not machine.is_known(fun):
            raise UnknownFunctionError(fun)
    machine.registry.clear(fun)


# -- MiniScript builtins -----------------------------------------------------

def _as_builtin(fn):
    signature = inspect.signature(fn)

    def builtin(machine, frame, args):
        try:
            signature.bind(machine, *args)
        except TypeError as exc:
            raise ArityError(f"{fn.__name__}: {exc}") from None
        fn(machine, *args)
    builtin.__name__ = fn.__name__
    return builtin


def _captureat_builtin(machine, frame, args):
    if not args:
        return captureat(machine)
    captureat(machine, *args)
    return None


KEY_FUNCTION_BUILTINS = {
    "gotoat": _as_builtin(gotoat),
    "assignat": _as_builtin(assignat),
    "captureat": _captureat_builtin,
    "returnat": _as_builtin(returnat),
    "evalat": _as_builtin(evalat),
    "clearat": _as_builtin(clearat),
}
