"""Exception types shared across the library."""


class CineplanError(Exception):
    """Base class for all library errors."""


class DomainError(CineplanError, ValueError):
    """A scalar argument is outside its valid domain (e.g. d <= 0)."""


class DegenerateError(DomainError):
    """A geometric configuration has no well-defined answer (eye == target)."""


class BehindCameraError(CineplanError, ValueError):
    """Point projection requested for a point at or behind the camera plane."""


class ValidationError(CineplanError, ValueError):
    """A composite object violates its invariants.

    ``field_path`` locates the offending field (e.g. ``behaviors[2].duration_s``)
    and ``violations`` lists every problem found, not just the first.
    """

    def __init__(self, message, field_path=None, violations=None):
        super().__init__(message)
        self.field_path = field_path
        self.violations = list(violations) if violations else [message]


class SchemaError(ValidationError):
    """A serialized document does not match its schema."""


class ExportError(CineplanError, RuntimeError):
    """A ground-truth export aborted; ``frame`` is the failing frame index."""

    def __init__(self, message, frame=None, completed_frames=0):
        super().__init__(message)
        self.frame = frame
        self.completed_frames = completed_frames
