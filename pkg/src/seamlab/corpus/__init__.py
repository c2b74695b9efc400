"""Example programs and suites that ship with seamlab.

``legacy``          the untouched ``foo``
``foo``             ``foo`` with ``<FOO:n>`` labels plus its injection suite
``foo_refactored``  ``foo`` after extracting ``sum0``, plus a direct suite
``bar``             the opaque ``bar`` and its snapshot (CACHE) suite
``bar_mutated``     ``bar`` with a deliberate behavior change
``demo``            ``surf`` and ``spy`` used by the evalat / returnat examples
"""

from pathlib import Path

ROOT = Path(__file__).resolve().parent


def path(*parts):
    return ROOT.joinpath(*parts)


def function_files():
    """Every function file in the corpus (suites excluded)."""
    return sorted(p for p in ROOT.rglob("*.ms") if not p.stem.endswith("_test"))


def suites():
    return sorted(ROOT.rglob("*_test.ms"))
