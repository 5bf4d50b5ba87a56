"""Exception types shared across the toolkit."""


class FragshareError(Exception):
    """Base class for all toolkit errors."""


class ParseError(FragshareError):
    """Malformed input text (bracketed, tagged, or JSONL)."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(FragshareError):
    """Structurally valid input that violates a model or operation contract."""


class PoolExhaustedError(FragshareError):
    """A label's fragment sub-pool cannot support assembly."""

    def __init__(self, label: str, message: str):
        self.label = label
        super().__init__(message)


class ConfigError(FragshareError):
    """Invalid pipeline configuration; raised before any work is done."""
