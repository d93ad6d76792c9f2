"""Exception hierarchy.

Each exception carries an ``exit_code`` class attribute used by the
command-line front end: 2 for configuration problems, 3 for bad input
data and 4 for numerical failures.
"""


class GnarxError(Exception):
    exit_code = 1


class ConfigurationError(GnarxError):
    exit_code = 2


class DataError(GnarxError):
    exit_code = 3


class ParseError(DataError):
    """A cell or a date in an input file could not be parsed."""


class DataFormatError(DataError):
    """Structurally invalid input (duplicated timestamps, ragged rows, ...)."""


class ValidationError(DataError):
    """Input values violate a documented precondition."""


class DimensionError(DataError):
    pass


class InsufficientDataError(DataError):
    pass


class UnsupportedDataError(DataError):
    pass


class LookupFailure(DataError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class DegenerateScaleError(DataError):
    pass


class NumericalError(GnarxError):
    exit_code = 4


class SingularityError(NumericalError):
    """Raised when a normal matrix cannot be factorised.

    Attributes
    ----------
    columns : list of int
        Indices of the columns found to be (numerically) linearly dependent.
    """

    def __init__(self, message, columns=()):
        super().__init__(message)
        self.columns = list(columns)


class DivergenceError(NumericalError):
    def __init__(self, message, step=None):
        super().__init__(message)
        self.step = step
