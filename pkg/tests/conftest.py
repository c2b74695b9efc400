import pytest

from seamlab import Machine, corpus

LISTING_1 = corpus.path("legacy", "foo.ms").read_text()
LISTING_2 = corpus.path("foo", "foo.ms").read_text()
LISTING_4 = corpus.path("foo_refactored", "foo.ms").read_text()

# entry-point arguments used whenever a test exercises the whole corpus
CORPUS_CALLS = {
    ("legacy", "foo.ms"): [("foo", (15.0, 2.0)), ("foo", (0.0, 1.0))],
    ("foo", "foo.ms"): [("foo", (15.0, 2.0)), ("foo", (0.0, 1.0)), ("foo", (5.0, 0.0))],
    ("foo_refactored", "foo.ms"): [("foo", (15.0, 2.0)), ("foo", (0.0, 1.0)),
                                   ("sum0", (5.0,))],
    ("bar", "bar.ms"): [("bar", (10.0,)), ("bar", (20.0,))],
    ("bar_mutated", "bar.ms"): [("bar", (10.0,)), ("bar", (20.0,))],
    ("demo", "surf.ms"): [("surf", ((1.0, 2.0, 3.0),))],
    ("demo", "spy.ms"): [("spy", ((1.0, 0.0, 2.0),)), ("spy", ((0.0, 0.0, 4.0, 5.0),))],
}


@pytest.fixture
def machine():
    return Machine()


@pytest.fixture
def loaded():
    """Machine factory: ``loaded(text_or_path, ..., **config)``."""
    def make(*sources, **config):
        m = Machine(**config)
        for src in sources:
            if isinstance(src, tuple):
                m.load_text(*src)
            else:
                m.load(src)
        return m
    return make


def pytest_terminal_summary(terminalreporter):
    import sys
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "REPORT", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines.values()):
            terminalreporter.write_line(line)
