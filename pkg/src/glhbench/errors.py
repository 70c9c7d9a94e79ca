"""Exception hierarchy shared by every module."""


class GLHError(ValueError):
    """Base class for all workbench errors."""


class SizeError(GLHError):
    """A qubit, set-size or bond-dimension cap was exceeded."""


class ValidationError(GLHError):
    """An object violates its structural invariants (hermiticity, unitarity, ...)."""


class InputError(GLHError):
    """Malformed call arguments such as wrong-length bit strings."""


class DegenerateInputError(GLHError):
    """The input is valid but degenerate for the requested operation."""


class UnsupportedError(GLHError):
    """The requested family or encoding is outside what the operation handles."""
