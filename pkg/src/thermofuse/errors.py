"""Exception types raised by the fusion toolkit."""


class FusionError(Exception):
    """Base class for all toolkit errors."""


class EmptyStack(FusionError):
    """An operation received zero frames or zero activity maps."""


class DimensionMismatch(FusionError):
    """Images or maps that must share a shape do not."""


class WindowTooLarge(FusionError):
    """The analysis window exceeds an image dimension."""


class DegenerateInput(FusionError):
    """Input on which the requested quantity is undefined."""


class ProbeOutOfBounds(FusionError):
    """A probe point lies outside the image."""


class NonPositiveInput(FusionError):
    """An optics formula received a non-positive parameter."""


class InvalidScene(FusionError):
    """A synthetic scene description violates its constraints."""


class ParseError(FusionError):
    """A frame file or manifest could not be parsed."""


class ValidationError(FusionError):
    """A loaded stack violates the focal-stack invariants."""
