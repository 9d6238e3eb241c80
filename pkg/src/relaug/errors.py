"""Exception hierarchy shared across the toolkit.

Everything raised on purpose derives from RelaugError so the CLI can map
failures to a single validation exit code.
"""


class RelaugError(Exception):
    """Base class for all toolkit errors."""


class FormatError(RelaugError):
    """A corpus file does not conform to the expected profile.

    Carries the 1-based line number when one is known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class InvariantError(RelaugError):
    """A domain object violates one of its invariants."""


class MarkerError(RelaugError):
    """Base for failures of the marked-text form. Names the offending marker."""

    def __init__(self, marker, message=None):
        self.marker = marker
        super().__init__(message or f"{type(self).__name__}: {marker}")


class MissingMarker(MarkerError):
    pass


class DuplicateMarker(MarkerError):
    pass


class EmptyEntity(MarkerError):
    pass


class InterleavedMarkers(MarkerError):
    pass


class UnknownId(RelaugError):
    """An instance id is not present in the index it was looked up in."""


class NoParse(RelaugError):
    """An operation that needs a dependency parse got an unparsed instance."""


class RelationTooSmall(RelaugError):
    """A relation group has no instances to sample from."""


class BackendUnavailable(RelaugError):
    """A generation backend cannot be started or reached at all."""


class ScorerFailure(RelaugError):
    """An external scorer process failed or produced unreadable output."""


class LineCountMismatch(ScorerFailure):
    """The scorer returned a different number of lines than it was fed."""
