"""Exception types shared across the package."""


class PcsftError(Exception):
    """Base class for all errors raised by pcsft."""


class ValidationError(PcsftError, ValueError):
    """An input violates a documented precondition or type invariant."""


class DimensionError(ValidationError):
    """Operands have incompatible shapes."""


class ConsumedEnsembleError(PcsftError, RuntimeError):
    """A measured (consumed) field ensemble was read again."""


class ParseError(ValidationError):
    """A text input file is malformed.

    ``line`` is the 1-based line number the problem was detected on, or
    ``None`` when the problem concerns the file as a whole.
    """

    def __init__(self, message, line=None, path=None):
        self.message = message
        self.line = line
        self.path = path
        where = []
        if path is not None:
            where.append(str(path))
        if line is not None:
            where.append(f"line {line}")
        prefix = ":".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)
