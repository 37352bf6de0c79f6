"""Exception hierarchy shared by all resnet modules."""


class ResnetError(Exception):
    """Base class for errors raised by this package."""


class DomainError(ResnetError, ValueError):
    """An argument is outside the operation's mathematical domain."""


class WindowError(ResnetError, LookupError):
    """A vertex beyond the materialized window (or a function's support
    window) was touched.  Nothing is ever silently zero-extended."""


class ConfigurationError(ResnetError, ValueError):
    """Invalid schedule, plan, or model parameters."""


class IncompatibleSourceError(DomainError):
    """A free-boundary Poisson solve was given a source with nonzero total
    charge, which has no solution on a finite region."""


class NumericalError(ResnetError, ArithmeticError):
    """A solve finished but failed its residual or conditioning checks."""


class GreenUndefinedError(DomainError):
    """The Green kernel was requested on a network whose random walk shows
    recurrent behaviour (monopole solves diverge)."""


class UnsupportedModelError(DomainError):
    """A closed-form oracle was requested for a model family that has none."""


class PreconditionError(DomainError):
    """A check's summability or decay precondition is not met by the data."""
