"""Exception hierarchy.  The CLI maps each family to an exit code."""


class ShockregError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class PreconditionError(ShockregError, ValueError):
    """Input violates an operation's stated precondition."""

    exit_code = 2


class DomainError(PreconditionError):
    """Thermodynamic input out of range (e.g. non-positive density)."""


class NoShockError(PreconditionError):
    """Upstream normal speed is not supersonic, so no compressive shock exists."""


class NoPolarError(PreconditionError):
    """Upstream state is subsonic; the shock polar is empty."""


class DetachedError(PreconditionError):
    """Wedge angle below the detachment threshold: no regular corner state."""


class GeometryError(PreconditionError):
    """Geometric construction failed (missing intersection, bad radius, ...)."""


class ValidationError(PreconditionError):
    """A configuration failed one or more admissibility checks."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NumericalError(ShockregError, RuntimeError):
    """Iterative method failed to converge."""

    exit_code = 3

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}
