"""Exception types raised across the toolkit."""


class GmtError(ValueError):
    """Base class for all domain errors."""


class CapExceeded(GmtError):
    """A brute-force routine was asked to work past its size cap."""


class ComplexError(GmtError):
    """An ill-formed complex, chain or orientation."""


class NotNullHomologous(GmtError):
    """The target cycle does not bound in the ambient complex."""


class WindowError(GmtError):
    """A grid value falls outside the admissible radius window of a check."""
