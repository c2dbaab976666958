"""Exception types shared across the engine.

Exit-code / HTTP mapping lives with the front ends (cli, service); the
engine only raises these.
"""

from __future__ import annotations


class HeartcastError(Exception):
    """Base class for all engine errors."""


class ValidationError(HeartcastError):
    """Bad input: malformed scenario fields, dimension mismatches, invalid
    covariance matrices, misaligned grids.

    ``field_path`` points at the offending field when known, e.g.
    ``"groups[1].population.cov"``.
    """

    def __init__(self, message: str, field_path: str | None = None):
        self.field_path = field_path
        if field_path:
            message = f"{field_path}: {message}"
        super().__init__(message)


class IngestionError(ValidationError):
    """A population sample file could not be parsed. Names row and field."""

    def __init__(self, path: str, row: int, field: str, message: str):
        self.path = path
        self.row = row
        self.field = field
        super().__init__(f"{path}, row {row}, field {field!r}: {message}")


class InsufficientDataError(HeartcastError):
    """A subgroup stayed below the significance threshold after every
    allowed relaxation. Carries the relaxation log for reporting.
    """

    def __init__(self, message: str, relaxation_log=(), module: str = ""):
        self.relaxation_log = list(relaxation_log)
        self.module = module
        if module:
            message = f"{module}: {message}"
        super().__init__(message)
