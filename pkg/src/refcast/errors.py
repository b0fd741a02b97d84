"""Exception hierarchy shared across the package.

Plain ``ValueError`` is still used for simple argument-domain violations
(probabilities outside [0, 1], non-positive budgets); the classes below mark
conditions callers are expected to branch on, in particular the CLI's exit
codes (1 for user/domain errors, 2 for store corruption).
"""


class RefcastError(Exception):
    """Base class for all refcast-specific errors."""


class CsvFormatError(RefcastError):
    """Whole-file ingestion failure: missing, unknown or malformed header."""


class NoActualOutcomeError(RefcastError):
    """Overrun requested for a record without an actual outcome (abandoned)."""


class InsufficientDataError(RefcastError):
    """Sample too small or too degenerate for the requested statistic."""


class UnknownCategoryError(RefcastError):
    """Category key not present in the taxonomy or uplift table."""


class StoreError(RefcastError):
    """Registry store I/O failure (collision, missing class, bad path)."""


class StoreCorruptError(StoreError):
    """Stored class file does not match its recorded checksum."""
