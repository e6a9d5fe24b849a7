"""Exception hierarchy shared by every diffiso module."""


class DiffisoError(Exception):
    """Base class for all library errors."""


class ValidationError(DiffisoError, ValueError):
    """An argument is malformed or outside its documented range."""


class SpaceMismatchError(ValidationError):
    """Two operands live in different edge spaces."""


class ContractError(ValidationError):
    """A documented precondition (e.g. "psi is an involution") does not hold."""


class CapacityError(DiffisoError):
    """The request would exceed a configured enumeration cap."""


class DegenerateConstructionError(ValidationError):
    """A construction was requested at parameters where it collapses."""


class FamilyFormatError(DiffisoError):
    """A family file could not be parsed or failed its integrity checks."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class LemmaViolation(DiffisoError):
    """An asserted finite statement failed; carries the full report."""

    def __init__(self, report):
        super().__init__(
            f"{report.lemma_id}: {report.violations} violation(s); "
            f"first: {report.first_violation} (seed={report.seed})"
        )
        self.report = report
