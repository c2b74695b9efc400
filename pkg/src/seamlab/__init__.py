"""seamlab: a small Matlab-style scripting language with injection testing.

Typical host use::

    from seamlab import Machine, injection
    m = Machine()
    m.load("foo.ms")
    injection.assignat(m, "foo", "at", "<FOO:1>", "a1", 15)
    injection.captureat(m, "foo", "at", "<FOO:2>", "var", "sum")
    m.call("foo")
    injection.captureat(m)   # {'FOO2': 120.0}
"""

from . import injection
from .injection import assignat, captureat, clearat, evalat, gotoat, returnat
from .runtime import UNSET, Config, Machine

__version__ = "0.1.0"

__all__ = [
    "UNSET", "Config", "Machine", "assignat", "captureat", "clearat", "evalat", "gotoat",
    "injection", "returnat",
]
