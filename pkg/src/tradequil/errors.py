"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations

from typing import Any


class TradeModelError(Exception):
    """Base class for domain errors. The CLI maps these to exit code 1."""


class UndefinedDemand(TradeModelError):
    """A country has zero expenditure but positive income at the given prices."""

    def __init__(self, message: str, countries: tuple[int, ...] = ()) -> None:
        super().__init__(message)
        self.countries = countries


class ZeroSupply(TradeModelError):
    """Total supply (or the matrix being normalized) sums to zero."""


class NoProgress(TradeModelError):
    """The solver stalled; ``result`` holds the best iterate found."""

    def __init__(self, message: str, result: Any = None) -> None:
        super().__init__(message)
        self.result = result


class DimensionTooLarge(TradeModelError):
    pass


class InconsistentSets(TradeModelError):
    pass


class UnknownFixture(TradeModelError):
    pass


class IngestError(TradeModelError):
    """Raised while parsing or aggregating flow records.

    ``row`` is the 1-based data row number (header excluded), when known.
    """

    def __init__(self, message: str, row: int | None = None) -> None:
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)
        self.row = row


class MalformedRow(IngestError):
    pass


class UnknownDirection(IngestError):
    pass


class SelfFlow(IngestError):
    pass


class NegativeValue(IngestError):
    pass


class UnknownLabel(IngestError):
    pass


class EmptySelection(IngestError):
    pass
