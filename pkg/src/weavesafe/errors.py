"""Exception types shared across the package.

The CLI maps these onto its fixed exit codes, so new error conditions
should reuse one of the classes below when they fit.
"""


class WeavesafeError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(WeavesafeError, ValueError):
    """Invalid code parameters or field degree."""


class SingularMatrixError(WeavesafeError, ValueError):
    """A matrix required to be nonsingular is singular."""


class InsufficientNodesError(WeavesafeError):
    """Too few live nodes or shares for the requested operation."""


class CapExceededError(WeavesafeError):
    """An exhaustive enumeration would exceed the configured cap."""


class ShareFormatError(WeavesafeError):
    """Malformed share file or manifest."""


class IntegrityError(WeavesafeError):
    """Reconstructed plaintext does not match the recorded digest."""
