"""Interpreter, values and the hook engine."""

from .machine import CallResult, Config, Frame, HookOutcome, Machine
from .values import UNSET, Closure, Handle, equal, kind_of, to_value, truthy

__all__ = [
    "UNSET", "CallResult", "Closure", "Config", "Frame", "Handle", "HookOutcome", "Machine",
    "equal", "kind_of", "to_value", "truthy",
]
