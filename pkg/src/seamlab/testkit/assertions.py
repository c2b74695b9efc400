"""EXPECT_* assertions.  A failed expectation is recorded, never raised."""

import difflib
import math
from dataclasses import dataclass
from typing import Optional

from ..errors import NotSerializableError, ScriptTypeError
from ..runtime.values import equal, inline, kind_of, truthy
from .snapshot import serialize


@dataclass
class AssertionOutcome:
    kind: str  # EXPECT_EQ | EXPECT_NEAR | EXPECT_TRUE
    passed: bool
    actual: object
    expected: object
    tolerance: Optional[float] = None
    site: tuple = ("", 0)  # (suite file, line)
    section: str = ""
    mismatches: tuple = ()
    snapshots: tuple = ()  # CACHE keys read or written on the assertion's line

    @property
    def label(self):
        return f"{self.kind} at {self.site[0]}:{self.site[1]}"


def mismatches(actual, expected, path=""):
    """Human-readable differences between two values, empty when equal."""
    where = path or "value"
    ka, ke = kind_of(actual), kind_of(expected)
    if ka != ke:
        return [f"{where}: {ka} {inline(actual)} vs expected {ke} {inline(expected)}"]
    if ka == "record":
        out = []
        for key in sorted(set(actual) | set(expected)):
            sub = f"{path}.{key}" if path else key
            if key not in expected:
                out.append(f"{sub}: unexpected key (actual {inline(actual[key])})")
            elif key not in actual:
                out.append(f"{sub}: missing key (expected {inline(expected[key])})")
            else:
                out.extend(mismatches(actual[key], expected[key], sub))
        return out
    if ka == "array" and len(actual) == len(expected):
        return [f"{where}({i + 1}): {inline(a)} vs expected {inline(e)}"
                for i, (a, e) in enumerate(zip(actual, expected)) if not equal(a, e)]
    if equal(actual, expected):
        return []
    return [f"{where}: {inline(actual)} vs expected {inline(expected)}"]


def expect_eq(actual, expected):
    diffs = mismatches(actual, expected)
    return AssertionOutcome("EXPECT_EQ", not diffs, actual, expected, mismatches=tuple(diffs))


def expect_near(actual, expected, tol):
    for name, v in (("actual", actual), ("expected", expected), ("tolerance", tol)):
        if not isinstance(v, (float, tuple)) or isinstance(v, bool):
            raise ScriptTypeError(f"EXPECT_NEAR {name} must be numeric, got a {kind_of(v)}")
    if not isinstance(tol, float) or tol < 0 or math.isnan(tol):
        raise ScriptTypeError("EXPECT_NEAR tolerance must be a non-negative number")
    a = actual if isinstance(actual, tuple) else (actual,)
    e = expected if isinstance(expected, tuple) else (expected,)
    if len(a) != len(e):
        passed = False
        diffs = [f"length {len(a)} vs expected {len(e)}"]
    else:
        diffs = [f"element {i + 1}: |{inline(x)} - {inline(y)}| > {inline(tol)}"
                 for i, (x, y) in enumerate(zip(a, e))
                 if not (x == y or abs(x - y) <= tol)]
        passed = not diffs
    return AssertionOutcome("EXPECT_NEAR", passed, actual, expected, tol,
                            mismatches=tuple(diffs))


def expect_true(value):
    try:
        passed = truthy(value)
        diffs = () if passed else (f"{inline(value)} is not truthy",)
    except ScriptTypeError as exc:
        passed, diffs = False, (exc.message,)
    return AssertionOutcome("EXPECT_TRUE", passed, value, True, mismatches=diffs)


def serialized_diff(actual, expected):
    """Unified diff of the canonical text forms (empty if not serializable)."""
    try:
        a = serialize(actual).splitlines()
        e = serialize(expected).splitlines()
    except NotSerializableError:
        return []
    return list(difflib.unified_diff(e, a, "expected", "actual", lineterm=""))
