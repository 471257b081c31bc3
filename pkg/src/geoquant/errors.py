"""Exception hierarchy shared by all geoquant modules."""


class GeoQuantError(Exception):
    """Base class for every error raised by this package."""


class ParseError(GeoQuantError, ValueError):
    """Text could not be parsed; ``position`` is the 0-based column."""

    def __init__(self, message, text=None, position=None):
        self.text = text
        self.position = position
        if position is not None:
            message = f"{message} (at column {position + 1})"
        super().__init__(message)


class UnmappedVariable(GeoQuantError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unmapped variable"


class ChartMismatch(GeoQuantError, ValueError):
    pass


class NotPolarizationPreserving(GeoQuantError):
    pass


class UnsupportedVariable(GeoQuantError, ValueError):
    pass


class NotDiagonalizable(GeoQuantError, ArithmeticError):
    pass


class FrameNotDiagonal(GeoQuantError):
    pass


class DegreeOverflow(GeoQuantError, ValueError):
    pass


class MissingEdgeValue(GeoQuantError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "missing edge value"


class NerveError(GeoQuantError, ValueError):
    pass


class InvalidPotential(GeoQuantError, ValueError):
    """A one-form whose exterior derivative is not the chart's symplectic form."""
