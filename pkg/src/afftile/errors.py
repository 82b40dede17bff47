"""Exception types shared across the package."""


class PreconditionError(ValueError):
    """Input violates a documented precondition of the operation."""


class NotExpandingError(PreconditionError):
    """Matrix has an eigenvalue of modulus <= 1, so it cannot drive an attractor."""


class SizeGuardError(RuntimeError):
    """Requested computation exceeds the configured size limit."""
