"""Exception hierarchy shared by every module.

Each class maps to a CLI exit code (see ``tdakit.cli``).
"""


class TdaError(Exception):
    exit_code = 1


class ValidationError(TdaError, ValueError):
    """Bad input value or shape."""

    exit_code = 2


class EmptyInputError(ValidationError):
    pass


class StructuralError(ValidationError):
    """A filtration or diagram violates a structural invariant."""


class ResourceError(TdaError):
    """A size cap or simplex budget would be exceeded."""

    exit_code = 3


class DataError(TdaError):
    """Data-dependent failure: divergent orbit, degenerate fit, missing dataset."""

    exit_code = 4


class DivergenceError(DataError):
    pass


class DegenerateFitError(DataError):
    pass


class SweepShapeError(DataError):
    pass
