"""Exception types raised across the package."""


class SorsvdError(Exception):
    """Base class for all package errors."""


class ShapeError(SorsvdError, ValueError):
    """Operand dimensions are not conformable."""


class ParameterError(SorsvdError, ValueError):
    """A numeric parameter is outside its admissible range."""


class BoundInapplicableError(SorsvdError, ValueError):
    """A deterministic bound was requested for a rank-deficient split."""


class NumericalError(SorsvdError, ArithmeticError):
    """An iteration produced non-finite values."""


class FormatError(SorsvdError, OSError):
    """A matrix or image file is malformed or unsupported."""
