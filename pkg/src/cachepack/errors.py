"""Exception types shared across the package."""


class CachepackError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(CachepackError):
    """Invalid input data or configuration."""


class NonPositiveSize(ValidationError):
    """A request or file size is below 1 byte."""


class RequestLargerThanFile(ValidationError):
    """request_size exceeds file_size."""


class OffGridValue(ValidationError):
    """A size is not on the profiling grid and snapping is disabled."""


class NonPositiveRuntime(ValidationError):
    """A base runtime is missing or not strictly positive."""


class NonPositiveObservation(ValidationError):
    """An observed degradation point must be a positive byte count."""


class DegradationOutOfRange(ValidationError):
    """A degradation fraction is outside [0, 1)."""


class SelfDegradation(CachepackError):
    """A workload was listed among its own co-residents."""


class DuplicateWorkload(CachepackError):
    """A workload id is already resident or queued."""


class UnknownWorkload(CachepackError):
    """A workload id is not resident anywhere."""


class SearchSpaceTooLarge(CachepackError):
    """The arrival sequence exceeds the exhaustive-search limit."""


class MalformedTable(ValidationError):
    """A degradation table file violates the format contract."""


class GridMismatch(MalformedTable):
    """A table file declares grids other than the canonical ones."""


class InconsistentInitialState(ValidationError):
    """A scenario's initial server loads violate the feasibility bounds."""


class UnknownSequence(ValidationError):
    """A scenario does not define the requested arrival sequence."""
