"""Exception types raised by the library.

Every error derives from :class:`VirateichError` so callers (and the CLI) can
catch the whole family at once. The split below mirrors the CLI exit codes:
:class:`InvalidInputError` and its subclasses mean the input was malformed
(exit 2); everything else is a computational failure (exit 1).
"""


class VirateichError(Exception):
    """Base class for all library errors."""


class InvalidInputError(VirateichError, ValueError):
    """Input violates a type invariant (wrong shape, non-finite values, ...)."""


class GridError(InvalidInputError):
    """Sample count is not a power of two >= 16, or grids do not match."""


class SchemaError(InvalidInputError):
    """A JSON document does not match the expected layout."""

    def __init__(self, path, message):
        self.path = path
        self.message = message
        super().__init__(f"{path or '<root>'}: {message}")


class PreconditionError(VirateichError, ValueError):
    """A mathematical precondition failed, e.g. a non-positive connection."""


class NumericalError(VirateichError, ArithmeticError):
    """A numerical routine did not converge or lost a structural property."""


class ResolutionError(NumericalError):
    """Extrapolation to the boundary did not converge on the given grid."""
