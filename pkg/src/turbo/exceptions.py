"""Exception hierarchy shared by the optimizer modules."""


class TurboError(Exception):
    """Base class for all errors raised by this package."""


class NumericalError(TurboError):
    """A Cholesky factorization failed even at the largest jitter.

    Attributes
    ----------
    jitter : float
        The last diagonal jitter that was attempted.
    """

    def __init__(self, message, jitter):
        super().__init__(f"{message} (last jitter tried: {jitter:g})")
        self.jitter = jitter


class ContractViolation(TurboError):
    """An operation was called in a state its contract forbids."""


class NoActiveRegionError(TurboError):
    """Batch selection was requested with no active trust region."""


class ConfigError(TurboError):
    """Invalid experiment configuration."""


class ObjectiveError(TurboError):
    """The objective raised while evaluating a point.

    The offending point (unit-cube coordinates) is kept on ``point``.
    """

    def __init__(self, point, cause):
        super().__init__(f"objective failed at {point!r}: {cause}")
        self.point = point
