"""Suite runner: executes a MiniScript test suite and always tears down."""

import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..errors import HaltError, ScriptRuntimeError, SeamError, SourceError
from ..source import tokenize
from . import assertions
from .snapshot import SnapshotStore

PRAGMA_RE = re.compile(r"^%\s*seamlab:load\s+(\S(?:.*\S)?)\s*$")
DEFAULT_SECTION = "main"


@dataclass
class Section:
    name: str
    line: int
    outcomes: list = field(default_factory=list)


@dataclass
class TestSuiteResult:
    suite: str
    sections: list = field(default_factory=list)
    diagnostics: list = field(default_factory=list)
    verdict: str = "pass"  # pass | fail | error
    error_kind: Optional[str] = None  # parse | runtime
    output: list = field(default_factory=list)

    __test__ = False  # not a pytest class

    @property
    def outcomes(self):
        return [o for s in self.sections for o in s.outcomes]

    @property
    def failures(self):
        return [o for o in self.outcomes if not o.passed]

    @property
    def section_names(self):
        return [s.name for s in self.sections]


def section_markers(tokens):
    """``(line, name)`` for every ``%%`` comment."""
    return [(t.line, t.lexeme[2:].strip()) for t in tokens
            if t.kind == "comment" and t.lexeme.startswith("%%")]


def suite_dependencies(suite_path):
    """Files named by ``% seamlab:load <path>`` pragmas, relative to the suite."""
    suite_path = Path(suite_path)
    deps = []
    for tok in tokenize(suite_path.read_text(encoding="utf-8")):
        if tok.kind == "comment":
            m = PRAGMA_RE.match(tok.lexeme)
            if m:
                deps.append(suite_path.parent / m.group(1))
    return deps


def load_dependencies(machine, suite_path):
    for dep in suite_dependencies(suite_path):
        machine.load(dep)


class _Collector:
    """Assertion and CACHE builtins bound to one suite run."""

    def __init__(self, machine, program, result):
        self.machine = machine
        self.program = program
        self.result = result
        self.store = SnapshotStore(machine.config.cache_dir)
        self._last = None
        self._cache_keys = {}  # (frame id, line) -> keys used there

    def section_for(self, frame):
        if frame.program is self.program:
            chosen = None
            for section in self.result.sections:
                if section.line <= frame.current_line:
                    chosen = section
            if chosen is not None:
                self._last = chosen
                return chosen
            return self._default()
        return self._last or self._default()

    def _default(self):
        sections = self.result.sections
        if not sections or sections[0].name != DEFAULT_SECTION or sections[0].line != 0:
            sections.insert(0, Section(DEFAULT_SECTION, 0))
        return sections[0]

    def record(self, frame, outcome):
        section = self.section_for(frame)
        outcome.site = (frame.program.source_path, frame.current_line)
        outcome.section = section.name
        outcome.snapshots = tuple(self._cache_keys.pop((frame.id, frame.current_line), ()))
        section.outcomes.append(outcome)

    def builtins(self):
        def expect_eq(machine, frame, args):
            _need("EXPECT_EQ", args, 2)
            self.record(frame, assertions.expect_eq(args[0], args[1]))

        def expect_near(machine, frame, args):
            _need("EXPECT_NEAR", args, 3)
            self.record(frame, assertions.expect_near(*args))

        def expect_true(machine, frame, args):
            _need("EXPECT_TRUE", args, 1)
            self.record(frame, assertions.expect_true(args[0]))

        def cache(machine, frame, args):
            _need("CACHE", args, 2)
            self.store.path(args[0])
            self.store.acquire()
            self._cache_keys.setdefault((frame.id, frame.current_line), []).append(args[0])
            return self.store.cache(args[0], args[1])

        return {"EXPECT_EQ": expect_eq, "EXPECT_NEAR": expect_near,
                "EXPECT_TRUE": expect_true, "CACHE": cache}


def _need(name, args, count):
    if len(args) != count:
        raise ScriptRuntimeError(f"{name} expects {count} arguments, got {len(args)}")


def run_suite(machine, suite_path):
    """Run the suite script at ``suite_path`` on ``machine``.

    Assertion failures never raise.  Whatever happens, the machine's
    injection registry is cleared and its capture store drained before
    returning.
    """
    result = TestSuiteResult(str(suite_path))
    first_diag = len(machine.diagnostics)
    first_out = len(machine.output)
    saved = dict(machine.builtins)
    collector = None
    try:
        try:
            text = Path(suite_path).read_text(encoding="utf-8")
            program = machine.load_text(text, str(suite_path))
        except (OSError, SourceError) as exc:
            result.verdict, result.error_kind = "error", "parse"
            result.diagnostics.append(str(exc))
            return result
        if program.kind != "script":
            result.verdict, result.error_kind = "error", "parse"
            result.diagnostics.append(f"{suite_path}: a suite must be a script, not a function file")
            return result
        result.sections = [Section(name, line) for line, name in section_markers(tokenize(text))]
        collector = _Collector(machine, program, result)
        machine.builtins.update(collector.builtins())
        try:
            machine.run_script(program.name, friend=True)
        except (ScriptRuntimeError, HaltError) as exc:
            result.verdict, result.error_kind = "error", "runtime"
            result.diagnostics.append(exc.render())
        except SeamError as exc:
            result.verdict, result.error_kind = "error", "runtime"
            result.diagnostics.append(f"{type(exc).__name__}: {exc}")
        if result.verdict != "error" and result.failures:
            result.verdict = "fail"
        return result
    finally:
        machine.registry.clear()
        machine.captures.clear()
        machine.builtins.clear()
        machine.builtins.update(saved)
        if collector is not None:
            collector.store.release()
        result.diagnostics[:0] = machine.diagnostics[first_diag:]
        result.output = machine.output[first_out:]
