"""Exception types shared across the package."""


class ParameterError(ValueError):
    """Invalid model or experiment parameters."""


class RegimeError(ParameterError):
    """Parameters solve to a probability outside (0, 1)."""


class FormatError(ValueError):
    """Malformed hypergraph file or config document."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class FeasibilityError(RuntimeError):
    """An exact computation would exceed its configured size cap."""


class InfeasibleConditioningError(RuntimeError):
    """Rejection sampling would accept too rarely to be practical."""
