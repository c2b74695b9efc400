"""Runtime values and the operations that do not need a Machine.

Values map onto plain Python objects:

========  ==============================================
number    ``float``
boolean   ``bool``
string    ``str``
array     ``tuple`` of floats
record    ``dict`` (str -> value), never mutated in place
closure   :class:`Closure`
handle    :class:`Handle`
========  ==============================================
"""

import math
from dataclasses import dataclass, field

from ..errors import ScriptTypeError


class _Unset:
    """Marker for an output variable that was never assigned."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNSET"

    def __bool__(self):
        return False


UNSET = _Unset()


@dataclass(eq=False)
class Closure:
    params: list
    body: object = field(repr=False)  # nodes.Expr
    text: str = ""
    env: dict = field(default_factory=dict)
    program: object = field(default=None, repr=False)
    friend: bool = False

    def __eq__(self, other):
        if not isinstance(other, Closure):
            return NotImplemented
        return (self.params == other.params and self.text == other.text
                and equal(self.env, other.env))

    __hash__ = None


@dataclass(eq=False)
class Handle:
    name: str
    program: object = field(default=None, repr=False)
    friend: bool = False

    def __eq__(self, other):
        return isinstance(other, Handle) and self.name == other.name

    def __hash__(self):
        return hash(self.name)


def kind_of(value):
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, float):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, tuple):
        return "array"
    if isinstance(value, dict):
        return "record"
    if isinstance(value, Closure):
        return "closure"
    if isinstance(value, Handle):
        return "handle"
    raise TypeError(f"not a MiniScript value: {value!r}")


def to_value(obj):
    """Convert a host Python object into a MiniScript value."""
    if isinstance(obj, (bool, str, Closure, Handle)):
        return obj
    if isinstance(obj, (int, float)):
        return float(obj)
    if isinstance(obj, (list, tuple)):
        return tuple(float(x) for x in obj)
    if isinstance(obj, dict):
        return {str(k): to_value(v) for k, v in obj.items()}
    raise TypeError(f"cannot convert {type(obj).__name__} to a MiniScript value")


def truthy(value):
    """Implicit condition value.  Strings, records and closures have none."""
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return value != 0
    if isinstance(value, tuple):
        return len(value) > 0 and all(x != 0 for x in value)
    raise ScriptTypeError(f"a {kind_of(value)} cannot be used as a condition")


def format_number(x):
    """Shortest text that reads back as ``x``; integral values lose the ``.0``."""
    if math.isnan(x):
        return "NaN"
    if math.isinf(x):
        return "Inf" if x > 0 else "-Inf"
    if x == 0:
        return "0"
    if x.is_integer() and abs(x) < 1e16:
        return str(int(x))
    return repr(x)


def inline(value):
    kind = kind_of(value)
    if kind == "number":
        return format_number(value)
    if kind == "boolean":
        return "true" if value else "false"
    if kind == "string":
        return "'" + value.replace("'", "''") + "'"
    if kind == "array":
        return "[" + ", ".join(format_number(x) for x in value) + "]"
    if kind == "record":
        return "{" + ", ".join(f"{k}: {inline(value[k])}" for k in sorted(value)) + "}"
    if kind == "closure":
        return value.text
    return "@" + value.name


def display_lines(value):
    """Lines ``disp`` writes for ``value``."""
    kind = kind_of(value)
    if kind == "string":
        return [value]
    if kind == "number":
        return [format_number(value)]
    if kind == "boolean":
        return ["1" if value else "0"]
    if kind == "array":
        return [" ".join(format_number(x) for x in value)] if value else []
    if kind == "record":
        return [f"{k}: {inline(value[k])}" for k in sorted(value)]
    return [inline(value)]


def equal(a, b):
    """Deep structural equality.

    Kinds must match; ``-0`` equals ``0`` and NaN equals NaN so that the
    relation is reflexive on every value.
    """
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, float) and isinstance(b, float):
        return a == b or (math.isnan(a) and math.isnan(b))
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if isinstance(a, tuple) and isinstance(b, tuple):
        return len(a) == len(b) and all(equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(equal(a[k], b[k]) for k in a)
    if isinstance(a, (Closure, Handle)) and type(a) is type(b):
        return a == b
    return False
