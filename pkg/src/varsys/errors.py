"""Exception hierarchy shared by all modules."""


class VarsysError(Exception):
    """Base class for every error raised by the package."""


class InvalidDimensionError(VarsysError, ValueError):
    pass


class StructuralError(VarsysError, ValueError):
    """Input violates a structural requirement (symmetry, shape, monotonicity)."""


class NumericalError(VarsysError, ArithmeticError):
    """An iterative method gave up; ``diagnostics`` holds what it achieved."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class HypothesisError(VarsysError):
    """A theorem hypothesis failed and no override was given."""


class ConfigError(VarsysError, ValueError):
    pass
