"""Exception types shared across the package."""


class LpmhdError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(LpmhdError):
    """Invalid option, unknown key, or out-of-range parameter."""


class PreconditionError(LpmhdError):
    """An operator precondition (e.g. solenoidality) is violated."""


class StepSizeError(LpmhdError):
    """Time step violates the CFL guard."""


class DiagnosticError(LpmhdError):
    """A diagnostic cannot be evaluated (e.g. empty frequency annulus)."""
