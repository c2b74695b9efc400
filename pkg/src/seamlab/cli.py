"""``seamlab`` command line: run programs, run suites, list labels.

Exit codes: 0 success, 1 assertion failures, 2 usage or parse error,
3 runtime error.  Reports go to stdout and diagnostics to stderr.
"""

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import HaltError, ScriptRuntimeError, SeamError, SourceError
from .runtime import Config, Machine
from .source import index_labels, parse, tokenize
from .source.labels import LABEL_RE
from .testkit import TestSuiteResult, load_dependencies, run_suite, serialized_diff

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2, 3
VERDICT_CODES = {"pass": EXIT_OK, "fail": EXIT_FAIL}
DEFAULT_CACHE_DIR = ".seamcache"


@dataclass
class CliConfig:
    command: str
    paths: list = field(default_factory=list)
    cache_dir: Path = Path(DEFAULT_CACHE_DIR)
    format: str = "human"
    fail_fast: bool = False
    halt_on_injection_error: bool = False

    def machine_config(self):
        return Config(cache_dir=Path(self.cache_dir),
                      halt_on_injection_error=self.halt_on_injection_error)


def _err(msg):
    print(msg, file=sys.stderr)


# -- run --------------------------------------------------------------------

def cmd_run(paths, config):
    machine = Machine(config.machine_config())
    machine.echo = print
    programs = []
    for path in paths:
        try:
            programs.append(machine.load(path))
        except OSError as exc:
            _err(f"seamlab: cannot read {path}: {exc.strerror or exc}")
            return EXIT_USAGE
        except SourceError as exc:
            _err(str(exc))
            return EXIT_USAGE
    for program in programs:
        try:
            if program.kind == "script":
                machine.run_script(program.name, friend=True)
            else:
                machine.call(program.name)
        except (ScriptRuntimeError, HaltError) as exc:
            _err(exc.render())
            return EXIT_RUNTIME
        except SeamError as exc:
            _err(f"{type(exc).__name__}: {exc}")
            return EXIT_RUNTIME
    for line in machine.diagnostics:
        _err(line)
    return EXIT_OK


# -- test -------------------------------------------------------------------

def suite_exit_code(result):
    if result.verdict == "error":
        return EXIT_USAGE if result.error_kind == "parse" else EXIT_RUNTIME
    return VERDICT_CODES[result.verdict]


def _run_one(path, config):
    machine = Machine(config.machine_config())
    try:
        load_dependencies(machine, path)
    except OSError as exc:
        return TestSuiteResult(str(path), verdict="error", error_kind="parse",
                               diagnostics=[f"{path}: cannot load dependency: {exc}"])
    except SourceError as exc:
        return TestSuiteResult(str(path), verdict="error", error_kind="parse",
                               diagnostics=[str(exc)])
    return run_suite(machine, path)


def run_suites(paths, config):
    """Run each suite on its own Machine; stops early under ``fail_fast``."""
    results = []
    for path in paths:
        result = _run_one(path, config)
        results.append(result)
        if config.fail_fast and result.verdict != "pass":
            break
    return results


def _site(outcome):
    return f"{outcome.site[0]}:{outcome.site[1]}"


def report_human(results, out=None):
    out = out or sys.stdout
    for result in results:
        print(f"{result.verdict.upper():5} {result.suite}", file=out)
        for line in result.diagnostics:
            _err(f"  {line}")
        for o in result.failures:
            snap = f" (snapshot {', '.join(o.snapshots)})" if o.snapshots else ""
            print(f"  FAILED {o.kind} [{o.section}] at {_site(o)}{snap}", file=out)
            for m in o.mismatches:
                print(f"    {m}", file=out)
            for d in serialized_diff(o.actual, o.expected):
                print(f"    {d}", file=out)
    sections = sum(1 for r in results for s in r.sections if s.outcomes)
    assertions = sum(len(r.outcomes) for r in results)
    failures = sum(len(r.failures) for r in results)
    print(f"{sections} sections, {assertions} assertions, {failures} failures", file=out)


def report_tap(results, out=None):
    out = out or sys.stdout
    outcomes = [o for r in results for o in r.outcomes]
    print("TAP version 14", file=out)
    print(f"1..{len(outcomes)}", file=out)
    n = 0
    for result in results:
        for line in result.diagnostics:
            for part in line.splitlines():
                print(f"# {part}", file=out)
        for o in result.outcomes:
            n += 1
            status = "ok" if o.passed else "not ok"
            print(f"{status} {n} - {o.section}: {_site(o)}", file=out)
            if not o.passed:
                for m in o.mismatches:
                    print(f"# {m}", file=out)
        if result.verdict == "error":
            print(f"# {result.suite}: {result.error_kind} error", file=out)


def cmd_test(paths, config):
    results = run_suites(paths, config)
    if config.format == "tap":
        report_tap(results)
    else:
        report_human(results)
    return max((suite_exit_code(r) for r in results), default=EXIT_OK)


# -- labels -----------------------------------------------------------------

def _referenced_labels(tokens):
    return {m.group(1) for t in tokens if t.kind == "string" for m in LABEL_RE.finditer(t.lexeme)}


def cmd_labels(paths, config=None):
    indexes, referenced, have_suites = [], set(), False
    code = EXIT_OK
    for path in paths:
        try:
            text = Path(path).read_text(encoding="utf-8")
            tokens = tokenize(text)
            program = parse(tokens, str(path))
            index = index_labels(text, program, tokens)
        except OSError as exc:
            _err(f"seamlab: cannot read {path}: {exc.strerror or exc}")
            code = EXIT_USAGE
            continue
        except SourceError as exc:
            _err(str(exc))
            code = EXIT_USAGE
            continue
        if program.kind == "script":
            have_suites = True
            referenced |= _referenced_labels(tokens)
        indexes.append((path, index))
    for path, index in indexes:
        for label, (function, line) in sorted(index.items(), key=lambda kv: kv[1][1]):
            print(f"{label}\t{function}\t{line}")
    if have_suites:
        for path, index in indexes:
            for label in index:
                if label not in referenced:
                    _err(f"note: <{label}> in {path} is not referenced by any suite")
    return code


# -- entry point ------------------------------------------------------------

def build_parser():
    parser = argparse.ArgumentParser(prog="seamlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="execute scripts or call function files with no arguments")
    run.add_argument("paths", nargs="+", metavar="file.ms")

    test = sub.add_parser("test", help="run test suites")
    test.add_argument("paths", nargs="+", metavar="suite.ms")
    test.add_argument("--format", choices=("human", "tap"), default="human")
    test.add_argument("--cache-dir", default=None,
                      help="snapshot directory (default: $SEAMLAB_CACHE_DIR or ./.seamcache)")
    test.add_argument("--fail-fast", action="store_true")
    test.add_argument("--halt-on-injection-error", action="store_true")

    labels = sub.add_parser("labels", help="list <NAME:NUM> labels")
    labels.add_argument("paths", nargs="+", metavar="file.ms")
    return parser


def parse_config(argv=None):
    ns = build_parser().parse_args(argv)
    cache_dir = (getattr(ns, "cache_dir", None) or os.environ.get("SEAMLAB_CACHE_DIR")
                 or DEFAULT_CACHE_DIR)
    return CliConfig(command=ns.command, paths=list(ns.paths), cache_dir=Path(cache_dir),
                     format=getattr(ns, "format", "human"),
                     fail_fast=getattr(ns, "fail_fast", False),
                     halt_on_injection_error=getattr(ns, "halt_on_injection_error", False))


COMMANDS = {"run": cmd_run, "test": cmd_test, "labels": cmd_labels}


def main(argv=None):
    config = parse_config(argv)
    return COMMANDS[config.command](config.paths, config)


if __name__ == "__main__":
    sys.exit(main())
