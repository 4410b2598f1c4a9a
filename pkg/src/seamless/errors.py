"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class SeamlessError(Exception):
    """Base class for all package errors."""


class EmptyImage(SeamlessError, ValueError):
    """The image has no adjacent pixel pair."""


class EmptyStream(SeamlessError, ValueError):
    """A distance stream produced no samples."""


class DecodeError(SeamlessError):
    """An image file could not be decoded."""


class OutOfRange(SeamlessError, ValueError):
    """A color temperature lies outside the embedded table."""


class InvalidTarget(SeamlessError, ValueError):
    """A resize target is too small."""


class DegenerateAbscissae(SeamlessError, ValueError):
    """All x values of a regression are equal."""


class EmptySample(SeamlessError, ValueError):
    """A statistical test received an empty sample."""


class ZeroVariance(SeamlessError, ValueError):
    """A correlation input has no spread in one coordinate."""


class ZeroSpread(SeamlessError, ValueError):
    """A z-score population has zero standard deviation."""


class SingleYearCareer(SeamlessError, ValueError):
    """A career spans a single year and cannot be normalized."""


class TargetUnreachable(SeamlessError, ValueError):
    """A synthetic image cannot reach the requested seamlessness."""


class SchemaError(SeamlessError, ValueError):
    """A manifest row violates the schema."""

    def __init__(self, message: str, row: int | None = None) -> None:
        self.row = row
        super().__init__(f"row {row}: {message}" if row is not None else message)


class DuplicateId(SchemaError):
    """Two manifest rows share a painting_id."""


class StoreCorruption(SeamlessError):
    """The results store contains an unreadable entry."""
