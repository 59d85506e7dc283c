"""Exception types raised by the algebra, constructors and CLI."""


class SuperCPNError(Exception):
    """Base class for all package-specific errors."""


class AlgebraMismatch(SuperCPNError):
    """Operands belong to different algebra contexts."""


class IndexOutOfRange(SuperCPNError):
    """Generator or projector index outside the valid range."""


class ZeroBody(SuperCPNError):
    """Inversion requested for a quantity whose body is zero (or below
    the float threshold)."""


class JetOrderExhausted(SuperCPNError):
    """A derivative was requested beyond the remaining jet truncation."""


class BasePointMismatch(SuperCPNError):
    """Jets expanded at different base points were combined."""


class OrderMismatch(SuperCPNError):
    """Superfield assembled from jets with inconsistent truncation orders."""


class DimensionMismatch(SuperCPNError):
    """Vector or matrix shapes incompatible."""


class LinearDependence(SuperCPNError):
    """Input vectors are linearly dependent at the base point."""


class ParityError(SuperCPNError):
    """An operand has the wrong Grassmann parity for the operation."""


class SingularBody(SuperCPNError):
    """The body matrix is singular; no Neumann inverse exists."""


class NotUnitary(SuperCPNError):
    """Gauge matrix fails the unitarity check."""


class UnknownCase(SuperCPNError):
    """Demo case name not recognised."""


class ConfigParseError(SuperCPNError):
    """Run configuration file malformed or inconsistent."""
