"""Exception hierarchy shared by all engine modules."""


class VideoRepairError(Exception):
    """Base class for every error raised by this package."""


class DomainError(VideoRepairError):
    """An argument is outside its documented domain (e.g. a zero count)."""


class ShapeError(VideoRepairError):
    """Tensor dimensions are inconsistent with what an operation requires."""


class BackendError(VideoRepairError):
    """A backend call failed at the transport level (connection, timeout, 5xx)."""

    def __init__(self, message: str, *, role: str | None = None, body: str | None = None):
        super().__init__(message)
        self.role = role
        self.body = body


class ProtocolError(VideoRepairError):
    """A request or reply violated the v1 wire schema; the raw body is preserved."""

    def __init__(self, message: str, *, role: str | None = None, body: str | None = None):
        super().__init__(message)
        self.role = role
        self.body = body


class ParseError(VideoRepairError):
    """A backend reply was schema-valid JSON but lacked required answer fields."""

    def __init__(self, message: str, *, body: str | None = None):
        super().__init__(message)
        self.body = body


class EmptyPlanError(VideoRepairError):
    """The planner reply contained no usable entity tuples."""


class CycleError(VideoRepairError):
    """Question dependencies form a cycle instead of a DAG."""


class EmptyMaskError(VideoRepairError):
    """No keyframe produced a single point for any preserved object."""


class EmptyRemainderError(VideoRepairError):
    """All questions concern preserved objects yet the score is below 1."""


class EmptyListError(VideoRepairError):
    """An operation that needs at least one element received none."""


class FileFormatError(VideoRepairError):
    """A tensor container file has a bad magic, version, or truncated payload."""


class ConfigError(VideoRepairError):
    """Pipeline or CLI configuration is unusable (unbound role, bad value)."""


class UnscriptedRequestError(VideoRepairError):
    """A mock server received a request whose fingerprint is not scripted."""


class AllCandidatesFailedError(BackendError):
    """Every candidate branch of a round failed; the round cannot be ranked."""
