"""Exception hierarchy shared by the numerical modules."""


class ComptonError(Exception):
    """Base class for all errors raised by this package."""


class PoleError(ComptonError, ValueError):
    """Argument sits on a pole of the gamma function."""


class ZeroBaseError(ComptonError, ValueError):
    """Complex power requested with a zero base."""


class DegenerateGeometryError(ComptonError, ValueError):
    """A direction was requested for a vector of (numerically) zero length."""


class SingularityError(ComptonError, ValueError):
    """An amplitude was evaluated on its pole without smoothing."""


class NonConvergenceError(ComptonError, RuntimeError):
    """Adaptive integration exhausted its evaluation budget.

    The partial result is attached as ``result`` so callers can still
    report what was reached.
    """

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class OracleAccuracyError(ComptonError, RuntimeError):
    """The partial-wave tail exceeded the requested oracle tolerance."""
