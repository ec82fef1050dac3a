"""Exception types raised by the solver and experiment layers."""


class Raman3NLSError(Exception):
    """Base class for all package errors."""


class TruncationMismatchError(Raman3NLSError, ValueError):
    """Spectral states with different truncations were combined."""


class WeightOverflowError(Raman3NLSError, OverflowError):
    """An exponential weight e^{r|k|} would exceed the overflow guard."""


class InvalidParametersError(Raman3NLSError, ValueError):
    """Equation parameters are outside the domain of an operation."""


class ZeroDataError(Raman3NLSError, ValueError):
    """An operation that needs nonzero initial data received zero data."""


class BlowUpError(Raman3NLSError, FloatingPointError):
    """Non-finite coefficients appeared during time stepping."""


class NoContractionError(Raman3NLSError, RuntimeError):
    """Picard iteration failed to certify a contraction."""


class ConfigError(Raman3NLSError, ValueError):
    """Malformed or inconsistent experiment configuration."""


class WindowSelectionError(Raman3NLSError, RuntimeError):
    """No fit window satisfied the residual bound."""
