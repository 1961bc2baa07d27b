"""Exception hierarchy shared across the toolkit.

Everything user-facing derives from RulcastError so the CLI can map
domain failures to a single exit code.
"""


class RulcastError(Exception):
    """Base class for all domain errors."""


class ParseError(RulcastError):
    """A source file could not be parsed.

    Carries the 1-based row number and offending field when known.
    """

    def __init__(self, message, row=None, field=None):
        self.row = row
        self.field = field
        prefix = ""
        if row is not None:
            prefix += f"row {row}"
        if field is not None:
            prefix += f" field '{field}'" if prefix else f"field '{field}'"
        super().__init__(f"{prefix}: {message}" if prefix else message)


class MissingDataError(RulcastError):
    """Required measurements or records are absent."""


class SizingMissingError(RulcastError):
    """An issue participates in CPV arithmetic without story points or sign."""

    def __init__(self, issue_id):
        self.issue_id = issue_id
        super().__init__(f"issue '{issue_id}' has no story points assigned")


class ParameterError(RulcastError):
    """An operation was called with out-of-range parameters."""


class TrainingError(RulcastError):
    """Classifier training could not proceed (e.g. empty corpus)."""


class InsufficientDataError(RulcastError):
    """Too few points to fit or validate a model."""


class DegenerateDataError(RulcastError):
    """Zero-variance predictor or target where variance is required."""


class PlanValidationError(RulcastError):
    """A release plan violates its structural invariants."""


class ComparisonError(RulcastError):
    """Reports being compared are not mutually comparable."""
