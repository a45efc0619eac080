"""Exception types shared across the toolkit."""


class Error(Exception):
    """Base class for all toolkit errors."""


class ConfigError(Error):
    """A parameter or configuration value is invalid."""


class InputError(Error):
    """Input data violates a precondition (duplicate ids, out-of-range values)."""


class ParseError(Error):
    """A file or record could not be parsed."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
