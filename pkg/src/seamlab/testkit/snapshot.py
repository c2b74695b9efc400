"""Canonical text serialization of values and the on-disk snapshot store.

The canonical form is JSON with sorted keys, two-space indentation and a
trailing newline.  Integral numbers are written without a fractional part,
``-0`` is written as ``0`` and non-finite numbers use ``NaN``/``Infinity``.
Arrays are JSON lists of numbers, records are JSON objects.
"""

import json
import math
import os
import re
import tempfile
from pathlib import Path

from filelock import FileLock, Timeout

from ..errors import DeserializeError, NotSerializableError, ScriptRuntimeError, StoreIOError
from ..runtime.values import kind_of

KEY_RE = re.compile(r"[A-Za-z0-9_]+\Z")
SUFFIX = ".snap"
LOCK_NAME = ".lock"


def _encode_number(x):
    if x == 0:
        return 0
    if math.isfinite(x) and x.is_integer() and abs(x) < 1e16:
        return int(x)
    return x


def _encode(value):
    kind = kind_of(value)
    if kind == "number":
        return _encode_number(value)
    if kind in ("boolean", "string"):
        return value
    if kind == "array":
        return [_encode_number(x) for x in value]
    if kind == "record":
        return {k: _encode(v) for k, v in value.items()}
    raise NotSerializableError(f"a {kind} cannot be serialized")


def serialize(value):
    """Canonical text for ``value``; equal values give identical text."""
    return json.dumps(_encode(value), sort_keys=True, indent=2, ensure_ascii=False,
                      allow_nan=True) + "\n"


def _decode(obj):
    if isinstance(obj, bool) or isinstance(obj, str):
        return obj
    if isinstance(obj, (int, float)):
        return float(obj)
    if isinstance(obj, list):
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in obj):
            raise DeserializeError("arrays may only hold numbers")
        return tuple(float(x) for x in obj)
    if isinstance(obj, dict):
        return {k: _decode(v) for k, v in obj.items()}
    raise DeserializeError(f"unexpected JSON element {obj!r}")


def deserialize(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DeserializeError(f"corrupt snapshot: {exc}") from None
    return _decode(obj)


class SnapshotStore:
    """One ``<key>.snap`` file per key inside ``directory``."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self._lock = None

    def path(self, key):
        if not isinstance(key, str) or not KEY_RE.match(key):
            raise ScriptRuntimeError(f"invalid snapshot key {key!r}; use letters, digits and _")
        return self.directory / (key + SUFFIX)

    def __contains__(self, key):
        return self.path(key).exists()

    def keys(self):
        if not self.directory.is_dir():
            return []
        return sorted(p.stem for p in self.directory.glob("*" + SUFFIX))

    def read(self, key):
        try:
            text = self.path(key).read_text(encoding="utf-8")
        except OSError as exc:
            raise StoreIOError(f"cannot read snapshot '{key}': {exc}") from None
        return deserialize(text)

    def write(self, key, value):
        target = self.path(key)
        text = serialize(value)
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(prefix=f".{key}.", suffix=".tmp", dir=self.directory)
            try:
                with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
                    fh.write(text)
                os.replace(tmp, target)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        except OSError as exc:
            raise StoreIOError(f"cannot write snapshot '{key}': {exc}") from None

    def cache(self, key, value):
        """Get-or-store: the stored value if ``key`` exists, else store ``value``."""
        if key in self:
            return self.read(key)
        self.write(key, value)
        return value

    # -- exclusive use ----------------------------------------------------------

    def acquire(self):
        if self._lock is not None:
            return
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StoreIOError(f"cannot create cache directory: {exc}") from None
        lock = FileLock(str(self.directory / LOCK_NAME), timeout=0, thread_local=False)
        try:
            lock.acquire()
        except Timeout:
            raise StoreIOError(
                f"cache directory {self.directory} is in use by another run") from None
        self._lock = lock

    def release(self):
        if self._lock is not None:
            self._lock.release()
            self._lock = None

    def __enter__(self):
        self.acquire()
        return self

    def __exit__(self, *exc):
        self.release()
