"""Exception types shared across the package."""


class BoundExceeded(Exception):
    """A result needs data beyond the lamination's period/preperiod bounds."""

    def __init__(self, message: str, bound: int | None = None):
        super().__init__(message)
        self.bound = bound


class LaminationError(RuntimeError):
    """Internal consistency failure while building a lamination."""


class TraceStalled(RuntimeError):
    """Ray continuation could not reach the requested potential.

    ``partial`` holds the :class:`~multibrot.numerics.TracedRay` accepted so far.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial
