"""Exception types shared across the package."""


class InvariantViolation(RuntimeError):
    """An internal consistency condition failed; signals an implementation bug."""


class TheoremViolation(RuntimeError):
    """A congruence system that is guaranteed solvable turned out not to be.

    Raising this is a bug witness, never a legitimate runtime outcome.
    """


class ScheduleFailure(RuntimeError):
    """A correction step of the hand-rolled lifting schedule left residual data."""


class SectionFormatError(ValueError):
    """A section/operator file failed to parse.

    ``lineno``/``colno`` are 1-based positions when the underlying JSON
    decoder provides them, else None.
    """

    def __init__(self, message, lineno=None, colno=None):
        super().__init__(message)
        self.lineno = lineno
        self.colno = colno
