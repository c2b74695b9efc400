"""Core builtins.  Each takes ``(machine, frame, args)`` and returns a value or None."""

import math

from ..errors import ScriptRuntimeError, ScriptTypeError, UserError
from .values import display_lines, format_number, kind_of


def _arity(name, args, low, high=None):
    high = low if high is None else high
    if not low <= len(args) <= high:
        want = str(low) if low == high else f"{low} to {high}"
        raise ScriptRuntimeError(f"{name} expects {want} argument(s), got {len(args)}")


def _number(name, value):
    if isinstance(value, bool):
        return float(value)
    if isinstance(value, float):
        return value
    raise ScriptTypeError(f"{name} expects a number, got a {kind_of(value)}")


def disp(machine, frame, args):
    _arity("disp", args, 1)
    for line in display_lines(args[0]):
        machine.emit(line)


def num2str(machine, frame, args):
    _arity("num2str", args, 1)
    v = args[0]
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return format_number(v)
    if isinstance(v, tuple):
        return " ".join(format_number(x) for x in v)
    if isinstance(v, str):
        return v
    raise ScriptTypeError(f"num2str expects a number, got a {kind_of(v)}")


def length(machine, frame, args):
    _arity("length", args, 1)
    v = args[0]
    if isinstance(v, (tuple, str)):
        return float(len(v))
    return 1.0


def error(machine, frame, args):
    _arity("error", args, 1)
    if not isinstance(args[0], str):
        raise ScriptTypeError(f"error expects a message string, got a {kind_of(args[0])}")
    raise UserError(args[0])


def true(machine, frame, args):
    _arity("true", args, 0)
    return True


def false(machine, frame, args):
    _arity("false", args, 0)
    return False


def isempty(machine, frame, args):
    _arity("isempty", args, 1)
    v = args[0]
    return isinstance(v, (tuple, str, dict)) and len(v) == 0


def mod(machine, frame, args):
    _arity("mod", args, 2)
    a, b = _number("mod", args[0]), _number("mod", args[1])
    if b == 0:
        return a
    return a - math.floor(a / b) * b


def floor(machine, frame, args):
    _arity("floor", args, 1)
    return float(math.floor(_number("floor", args[0])))


def abs_(machine, frame, args):
    _arity("abs", args, 1)
    v = args[0]
    if isinstance(v, tuple):
        return tuple(abs(x) for x in v)
    return abs(_number("abs", v))


def isfield(machine, frame, args):
    _arity("isfield", args, 2)
    return isinstance(args[0], dict) and isinstance(args[1], str) and args[1] in args[0]


CORE_BUILTINS = {
    "disp": disp,
    "num2str": num2str,
    "length": length,
    "error": error,
    "true": true,
    "false": false,
    "isempty": isempty,
    "mod": mod,
    "floor": floor,
    "abs": abs_,
    "isfield": isfield,
}
