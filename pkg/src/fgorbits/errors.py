"""Exception types shared across the package."""


class FgOrbitsError(Exception):
    """Base class for all package errors."""


class InvalidInputError(FgOrbitsError, ValueError):
    """Malformed or out-of-contract input (exit code 1 at the CLI)."""


class UnsupportedRankError(InvalidInputError):
    """Operation defined only for rank 2 was called on another rank."""


class ResourceLimitError(FgOrbitsError, RuntimeError):
    """A configured search cap was exceeded (exit code 2 at the CLI)."""


class RegexSyntaxError(InvalidInputError):
    """Syntax error in a rational-set expression; carries the position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position
