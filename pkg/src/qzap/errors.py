"""Exception types shared across the package."""


class QzapError(Exception):
    """Base class for all package-specific errors."""


class WindowError(QzapError):
    """An index or index range falls outside the stored window.

    Carries the missing range so callers can extend their data.
    """

    def __init__(self, message, missing_min=None, missing_max=None):
        super().__init__(message)
        self.missing_min = missing_min
        self.missing_max = missing_max


class UndefinedAtZeroError(QzapError):
    """A value at the point t = 0 was required but never supplied."""


class RegressivityError(QzapError):
    """1 + mu*p vanished (or a positivity requirement failed) at some index."""

    def __init__(self, message, index=None, component=None):
        super().__init__(message)
        self.index = index
        self.component = component


class OverflowGuardError(QzapError):
    """A window would require q**n beyond the supported |n| <= 1024 range."""


class DivergenceError(QzapError):
    """A trajectory produced a non-finite state."""

    def __init__(self, message, first_bad_index=None):
        super().__init__(message)
        self.first_bad_index = first_bad_index


class InfeasibleCertificateError(QzapError):
    """The contraction certificate failed one of its inequalities."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate


class ConvergenceError(QzapError):
    """Fixed-point iteration exhausted its budget before reaching tolerance."""

    def __init__(self, message, log=None):
        super().__init__(message)
        self.log = log


class SchemaError(QzapError):
    """A structured-text document failed to parse or validate."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
