"""Exception types shared across the package."""


class HyperCourantError(Exception):
    """Base class for every error raised by this package."""


class DimensionMismatchError(HyperCourantError, ValueError):
    pass


class DegreeError(HyperCourantError, ValueError):
    pass


class SkewnessError(HyperCourantError, ValueError):
    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class SingularError(HyperCourantError, ValueError):
    pass


class StructureConstantError(HyperCourantError, ValueError):
    pass


class WellDefinednessError(HyperCourantError, ValueError):
    def __init__(self, message, mismatch=None):
        super().__init__(message)
        self.mismatch = mismatch


class PreconditionError(HyperCourantError, ValueError):
    """Raised when an operation's input fails a required check.

    The failing report, if any, is attached as ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InternalConsistencyError(HyperCourantError, AssertionError):
    """Two independent computations of the same quantity disagreed.

    This always signals a bug (usually a sign convention), never bad input.
    """


class GenerationError(HyperCourantError, RuntimeError):
    pass


class DocumentError(HyperCourantError, ValueError):
    """An input document failed to parse or validate.

    ``location`` is a JSON path such as ``omega[1][0][2]``, or a
    ``line L, column C`` position for syntax errors.
    """

    def __init__(self, message, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location
