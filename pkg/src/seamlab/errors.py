"""Exception hierarchy shared by every seamlab layer."""


class SeamError(Exception):
    """Base class for all seamlab errors."""


# -- source -----------------------------------------------------------------

class SourceError(SeamError):
    """A problem with program text, located at ``line``/``column``."""

    def __init__(self, message, line=None, column=None, path=None):
        self.message = message
        self.line = line
        self.column = column
        self.path = path
        super().__init__(self._format())

    def _format(self):
        where = []
        if self.path:
            where.append(str(self.path))
        if self.line is not None:
            where.append(str(self.line))
            if self.column is not None:
                where.append(str(self.column))
        prefix = ":".join(where)
        return f"{prefix}: {self.message}" if prefix else self.message


class LexError(SourceError):
    pass


class ParseError(SourceError):
    pass


class DuplicateLabelError(SourceError):
    def __init__(self, label, first_line, second_line, path=None):
        self.label = label
        self.first_line = first_line
        self.second_line = second_line
        super().__init__(
            f"duplicate label <{label}> on lines {first_line} and {second_line}",
            line=second_line, path=path)


class LabelPlacementError(SourceError):
    """A label comment that is not inside any function body."""


# -- site resolution --------------------------------------------------------

class ResolutionError(SeamError):
    pass


class UnknownFunctionError(ResolutionError):
    def __init__(self, name):
        self.name = name
        super().__init__(f"unknown function '{name}'")


class UnknownLabelError(ResolutionError):
    def __init__(self, label, function=None):
        self.label = label
        self.function = function
        msg = f"unknown label <{label}>"
        if function:
            msg += f" in function '{function}'"
        super().__init__(msg)


class LineOutOfRangeError(ResolutionError):
    def __init__(self, function, line, span):
        self.function = function
        self.line = line
        self.span = span
        super().__init__(
            f"line {line} is outside function '{function}' (lines {span[0]}-{span[1]})")


class JumpTargetError(ResolutionError):
    pass


class ArityError(SeamError):
    pass


# -- runtime ----------------------------------------------------------------

class ScriptRuntimeError(SeamError):
    """An error raised while executing MiniScript code.

    Catchable by ``try``/``catch`` in scripts.  ``function`` and ``line`` are
    filled in by the engine at the innermost statement that raised.
    """

    kind = "ScriptRuntimeError"

    def __init__(self, message, function=None, line=None):
        self.message = message
        self.function = function
        self.line = line
        super().__init__(message)

    def locate(self, function, line):
        if self.function is None:
            self.function = function
            self.line = line
        return self

    def render(self):
        fn = self.function or "?"
        line = self.line if self.line is not None else "?"
        return (f"identifier: '{self.kind}'\n"
                f"message: '{self.message}'\n"
                f"file: '{fn}.ms::{line}'")

    def __str__(self):
        if self.function is None:
            return self.message
        return f"{self.message} (in {self.function} at line {self.line})"


class ScriptTypeError(ScriptRuntimeError):
    kind = "TypeError"


class UndefinedVariableError(ScriptRuntimeError):
    kind = "UndefinedVariableError"


class ScriptIndexError(ScriptRuntimeError):
    kind = "IndexError"


class UserError(ScriptRuntimeError):
    """Raised by the ``error(msg)`` builtin."""

    kind = "UserError"


class RefClearedVarError(ScriptRuntimeError):
    kind = "RefClearedVarError"

    def __init__(self, function=None, line=None, frame=None):
        self.frame = frame
        super().__init__("Reference to a cleared variable.", function, line)


class UnsetOutputError(ScriptRuntimeError):
    kind = "UnsetOutputError"


class RecursionLimitError(ScriptRuntimeError):
    kind = "RecursionLimitError"


class CaptureMissError(ScriptRuntimeError):
    kind = "CaptureMissError"


class NotSerializableError(ScriptRuntimeError):
    kind = "NotSerializableError"


class DeserializeError(ScriptRuntimeError):
    kind = "DeserializeError"


class StoreIOError(ScriptRuntimeError):
    kind = "StoreIOError"


class HaltError(SeamError):
    """Stops a run outright.  Never caught by script ``try``/``catch``."""

    kind = "HaltError"

    def __init__(self, message, function=None, line=None):
        self.message = message
        self.function = function
        self.line = line
        super().__init__(message)

    render = ScriptRuntimeError.render


class BreakpointHitError(HaltError):
    kind = "BreakpointHitError"

    def __init__(self, function, line):
        super().__init__(f"breakpoint hit in {function} at line {line}", function, line)


class InjectionError(HaltError):
    kind = "InjectionError"

    def __init__(self, cause, function, line):
        self.cause = cause
        super().__init__(f"injected code failed: {cause}", function, line)
