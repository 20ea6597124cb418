"""Exception types raised across the package."""


class QCorrError(Exception):
    """Base class for all package errors."""


class NonHermitianInput(QCorrError, ValueError):
    pass


class InvalidState(QCorrError, ValueError):
    """Input does not describe a physical two-qubit state."""


class DomainError(QCorrError, ValueError):
    pass


class NotEntangled(QCorrError, ValueError):
    pass


class NotBellDiagonal(QCorrError, ValueError):
    pass


class OptimizerFailure(QCorrError, RuntimeError):
    """No optimizer run met its tolerance within the iteration budget."""


class ParseError(QCorrError, ValueError):
    pass


class AmbiguousInput(ParseError):
    pass


class UnknownSuite(QCorrError, KeyError):
    pass
