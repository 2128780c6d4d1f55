"""Exception types raised across the package."""


class PolarError(ValueError):
    """Base class for all data errors raised by polarrep."""


class DegenerateContour(PolarError):
    pass


class EmptyMask(PolarError):
    pass


class DimensionMismatch(PolarError):
    pass


class BothEmpty(PolarError):
    pass


class InvalidRays(PolarError):
    pass


class OutOfExtent(PolarError):
    pass


class OutOfRange(PolarError):
    pass


class NonFiniteLoss(PolarError):
    pass


class ParseError(PolarError):
    """A record in an input file failed validation.

    Carries the offending record id so the CLI can report it.
    """

    def __init__(self, record_id, reason):
        self.record_id = record_id
        self.reason = reason
        super().__init__(f"{record_id}: {reason}")


class EmptyRasterWarning(UserWarning):
    """Rasterization produced no set pixels (shape lies outside the frame)."""
