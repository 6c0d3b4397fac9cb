"""Exception hierarchy.

Every error raised on purpose by the library derives from ``SliceLabError``;
the CLI maps the subclasses onto its exit codes.
"""


class SliceLabError(Exception):
    pass


class SupportOverflow(SliceLabError):
    """A series operation produced support beyond ``max_degree``."""

    def __init__(self, lo, hi, max_degree):
        self.lo, self.hi, self.max_degree = lo, hi, max_degree
        super().__init__(
            f"support [{lo}, {hi}] exceeds max_degree={max_degree}"
        )


class NotInvertible(SliceLabError):
    pass


class ZeroValue(SliceLabError):
    pass


class DegenerateUnits(SliceLabError):
    pass


class Unclassifiable(SliceLabError):
    pass


class AmbientMismatch(SliceLabError):
    pass


class ZeroFunction(SliceLabError):
    pass


class DoublyInvariant(SliceLabError):
    pass


class PointTooCloseToBoundary(SliceLabError):
    pass


class FactorizationResidual(SliceLabError):
    """Post-checks of a factorization failed; the report is attached."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
