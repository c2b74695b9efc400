"""Operators, ranges, array literals and indexing."""

import math
import operator

from ..errors import ScriptIndexError, ScriptTypeError
from .values import kind_of, truthy


def _numeric(value, op):
    if isinstance(value, bool):
        return float(value)
    if isinstance(value, (float, tuple)):
        return value
    raise ScriptTypeError(f"operator '{op}' is not defined for a {kind_of(value)}")


def _divide(a, b):
    try:
        return a / b
    except ZeroDivisionError:
        if a == 0 or math.isnan(a):
            return math.nan
        return math.copysign(math.inf, a) * math.copysign(1.0, b)


def _power(a, b):
    try:
        result = math.pow(a, b)
    except OverflowError:
        return math.inf
    except ValueError:
        return math.nan
    return result


_ARITH = {
    "+": operator.add,
    "-": operator.sub,
    "*": operator.mul,
    "/": _divide,
    "^": _power,
}
_COMPARE = {
    "==": operator.eq,
    "~=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}
# array-array operations allowed elementwise when lengths agree
_ELEMENTWISE = {"+", "-", "==", "~=", "<", "<=", ">", ">="}


def binary(op, left, right):
    if op in ("==", "~=") and isinstance(left, str) and isinstance(right, str):
        return (left == right) == (op == "==")
    a = _numeric(left, op)
    b = _numeric(right, op)
    if op in _ARITH:
        fn, wrap = _ARITH[op], float
    else:
        fn, wrap = _COMPARE[op], None
    if isinstance(a, float) and isinstance(b, float):
        return fn(a, b) if wrap else bool(fn(a, b))
    as_number = wrap or (lambda r: float(bool(r)))
    if isinstance(a, tuple) and isinstance(b, tuple):
        if op not in _ELEMENTWISE:
            raise ScriptTypeError(f"operator '{op}' is not defined between two arrays")
        if len(a) != len(b):
            raise ScriptTypeError(f"array lengths differ ({len(a)} vs {len(b)}) for '{op}'")
        return tuple(as_number(fn(x, y)) for x, y in zip(a, b))
    if isinstance(a, tuple):
        return tuple(as_number(fn(x, b)) for x in a)
    return tuple(as_number(fn(a, y)) for y in b)


def unary(op, value):
    if op == "~":
        if isinstance(value, tuple):
            return tuple(float(x == 0) for x in value)
        return not truthy(value)
    v = _numeric(value, op)
    if op == "+":
        return v
    if isinstance(v, tuple):
        return tuple(-x for x in v)
    return -v


def make_range(start, step, stop):
    for v in (start, step, stop):
        if not isinstance(v, (float, bool)):
            raise ScriptTypeError("range bounds must be scalars")
    start, step, stop = float(start), float(step), float(stop)
    if step == 0 or any(math.isnan(v) for v in (start, step, stop)):
        return ()
    if (step > 0 and start > stop) or (step < 0 and start < stop):
        return ()
    count = int(math.floor((stop - start) / step + 1e-10)) + 1
    return tuple(start + k * step for k in range(count))


def concat(values):
    """``[e1, e2, ...]``: all strings concatenate, numbers flatten to an array."""
    if not values:
        return ()
    if all(isinstance(v, str) for v in values):
        return "".join(values)
    out = []
    for v in values:
        if isinstance(v, (bool, float)):
            out.append(float(v))
        elif isinstance(v, tuple):
            out.extend(v)
        else:
            raise ScriptTypeError(f"cannot put a {kind_of(v)} into a numeric array")
    return tuple(out)


def _positions(index, length):
    if isinstance(index, (bool, float)):
        items, scalar = [float(index)], True
    elif isinstance(index, tuple):
        items, scalar = list(index), False
    else:
        raise ScriptTypeError(f"a {kind_of(index)} cannot be used as an index")
    out = []
    for x in items:
        if not float(x).is_integer() or x < 1:
            raise ScriptIndexError(f"index must be a positive integer, got {x!r}")
        if x > length:
            raise ScriptIndexError(f"index {int(x)} exceeds length {length}")
        out.append(int(x) - 1)
    return out, scalar


def index(value, args):
    if len(args) != 1:
        raise ScriptIndexError("only one-dimensional indexing is supported")
    if isinstance(value, (bool, float)):
        positions, scalar = _positions(args[0], 1)
        return value if scalar else tuple(float(value) for _ in positions)
    if isinstance(value, tuple):
        positions, scalar = _positions(args[0], len(value))
        if scalar:
            return value[positions[0]]
        return tuple(value[p] for p in positions)
    if isinstance(value, str):
        positions, _ = _positions(args[0], len(value))
        return "".join(value[p] for p in positions)
    raise ScriptTypeError(f"a {kind_of(value)} cannot be indexed")


def assign_index(current, args, new):
    """Array with position ``args[0]`` set to ``new``; grows with zeros."""
    if len(args) != 1:
        raise ScriptIndexError("only one-dimensional indexing is supported")
    if current is None:
        current = ()
    if isinstance(current, (bool, float)):
        current = (float(current),)
    if not isinstance(current, tuple):
        raise ScriptTypeError(f"cannot index-assign into a {kind_of(current)}")
    if not isinstance(new, (bool, float)):
        raise ScriptTypeError(f"cannot store a {kind_of(new)} in a numeric array")
    pos = args[0]
    if not isinstance(pos, (bool, float)) or not float(pos).is_integer() or pos < 1:
        raise ScriptIndexError(f"index must be a positive integer, got {pos!r}")
    i = int(pos) - 1
    items = list(current)
    if i >= len(items):
        items.extend([0.0] * (i + 1 - len(items)))
    items[i] = float(new)
    return tuple(items)
