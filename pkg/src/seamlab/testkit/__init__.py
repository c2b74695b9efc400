"""Assertions, the CACHE snapshot store and the suite runner."""

from .assertions import (AssertionOutcome, expect_eq, expect_near, expect_true, mismatches,
                         serialized_diff)
from .runner import (Section, TestSuiteResult, load_dependencies, run_suite,
                     suite_dependencies)
from .snapshot import SnapshotStore, deserialize, serialize

__all__ = [
    "AssertionOutcome", "Section", "SnapshotStore", "TestSuiteResult", "deserialize",
    "expect_eq", "expect_near", "expect_true", "load_dependencies", "mismatches", "run_suite",
    "serialize", "serialized_diff", "suite_dependencies",
]
