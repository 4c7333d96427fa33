"""Exception types shared across the package."""


class FasRelayError(Exception):
    """Base class for all package-specific errors."""


class DegenerateGeometryError(FasRelayError, ValueError):
    """Raised when a link distance collapses to zero (UAV on top of an endpoint)."""


class CausalityError(FasRelayError, ValueError):
    """Raised when port scanning cannot finish within the transmission block."""


class MonotonicityError(FasRelayError, RuntimeError):
    """Raised when the BLER-vs-power precheck finds a non-monotone profile."""


class EigenConvergenceError(FasRelayError, RuntimeError):
    """Raised when the Jacobi eigensolver fails to converge."""


class QuadratureError(FasRelayError, RuntimeError):
    """Raised when adaptive quadrature cannot reach the requested tolerance."""


class ConfigError(FasRelayError, ValueError):
    """Config-file parse or validation failure, annotated with a line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
