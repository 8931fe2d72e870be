"""Exception types raised across the package.

Each class maps to a CLI exit code through ``EXIT_CODES``.
"""


class Vart2Error(Exception):
    """Base class for all package errors."""


# numerics
class SingularMatrix(Vart2Error):
    pass


class NotPositiveDefinite(Vart2Error):
    pass


class NonConvergence(Vart2Error):
    pass


# model / chart inputs
class InvalidModel(Vart2Error):
    """A model document or parameter set is malformed or inconsistent."""


class NonStationary(InvalidModel):
    pass


class DimensionMismatch(Vart2Error):
    pass


class MissingHistory(Vart2Error):
    pass


class DegreesOfFreedomExhausted(Vart2Error):
    pass


class ParseError(Vart2Error):
    """An input file could not be read into the expected structure."""


# estimation
class EstimationError(Vart2Error):
    pass


class RankDeficientRegressors(EstimationError):
    pass


class ZeroVariance(EstimationError):
    pass


class InsufficientData(EstimationError):
    pass


# simulation
class ExcessiveCensoring(Vart2Error):
    pass


EXIT_CODES = {
    ParseError: 2,
    DimensionMismatch: 2,
    MissingHistory: 2,
    DegreesOfFreedomExhausted: 2,
    EstimationError: 3,
    InvalidModel: 4,
    SingularMatrix: 4,
    NotPositiveDefinite: 4,
    NonConvergence: 4,
    ExcessiveCensoring: 5,
}


def exit_code_for(exc: BaseException) -> int:
    for cls in type(exc).__mro__:
        if cls in EXIT_CODES:
            return EXIT_CODES[cls]
    return 1
