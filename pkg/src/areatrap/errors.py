"""Exception hierarchy.

Everything raised on bad input derives from :class:`ValidationError`, which the
CLI maps to exit code 1.
"""


class AreatrapError(Exception):
    pass


class ValidationError(AreatrapError, ValueError):
    pass


class InvalidParameter(ValidationError):
    pass


class DegenerateAnchor(ValidationError):
    pass


class DegenerateChord(ValidationError):
    pass


class InvalidOrder(ValidationError):
    pass


class InvalidRegion(ValidationError):
    pass


class InvalidEndpoint(ValidationError):
    pass


class InvalidInput(ValidationError):
    pass


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class SizeCapExceeded(ValidationError):
    pass


class InsufficientData(ValidationError):
    pass


class EmptyPlot(ValidationError):
    pass


class Infeasible(AreatrapError):
    """No increasing path traps the required area."""

    def __init__(self, threshold, max_trappable_area):
        self.threshold = threshold
        self.max_trappable_area = max_trappable_area
        super().__init__(
            f"infeasible: max trappable area {max_trappable_area!r} < threshold {threshold!r}"
        )
