"""Domain exceptions shared by services and commands."""

from typing import Any, Optional


class LincompError(ValueError):
    """Base class for every domain error raised by the library."""

    def __init__(self, message: str, details: Optional[dict] = None):
        super().__init__(message)
        self.message = message
        self.details = details or {}

    def to_dict(self) -> dict:
        payload: dict[str, Any] = {'error': type(self).__name__, 'message': self.message}
        if self.details:
            payload['details'] = self.details
        return payload


class ParseError(LincompError):
    """Textual input does not follow the expected grammar."""


class MalformedInput(LincompError):
    """A CSV/JSON document is structurally invalid."""


class InfinityClash(LincompError):
    """Opposite infinities met in one endpoint sum."""


class OutOfConfinement(LincompError):
    pass


class EmptySequence(LincompError):
    pass


class NonFiniteEndpoint(LincompError):
    pass


class AtomMismatch(LincompError):
    """Atom lists of measures/operators do not line up."""


class AlphaOutOfRange(LincompError):
    pass


class ColumnMassNotOne(LincompError):
    pass


class SizeMismatch(LincompError):
    pass


class MissingExternalInput(LincompError):
    pass


class ShapeMismatch(LincompError):
    pass


class AsymmetricMask(LincompError):
    pass


class BadRange(LincompError):
    pass


class NotLipschitz(LincompError):
    """Continuity bound requested for a program with a Product template."""
