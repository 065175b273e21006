"""Exception types shared across the package."""


class JordanMaskError(Exception):
    """Base class for all errors raised by this package."""


class DecodeError(JordanMaskError):
    """An image file could not be decoded (malformed header, truncated payload)."""


class UnsupportedFormatError(JordanMaskError):
    """An image has a layout or file format the package does not handle."""


class DegenerateInputError(JordanMaskError):
    """Input is too degenerate for the requested operation (e.g. single-valued image)."""


class DomainError(JordanMaskError, ValueError):
    """A pixel coordinate lies outside the domain, or two domains disagree."""
