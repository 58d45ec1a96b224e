"""Exception types raised by :mod:`borelinv`."""


class BorelInvError(Exception):
    """Base class for all package errors."""


class ParamError(BorelInvError, ValueError):
    """Parameters outside the admissible range (e.g. ``sigma <= 1``)."""


class DomainError(BorelInvError, ValueError):
    """Argument lies on a branch cut of the function being evaluated."""


class BranchCutError(DomainError):
    """Real argument on the cut ``(-inf, -1/e]`` of the principal Lambert W."""


class ConvergenceError(BorelInvError, RuntimeError):
    """An iteration exhausted its budget. Indicates a bug, not bad input."""


class QuadratureError(BorelInvError, RuntimeError):
    """Adaptive quadrature could not reach the requested tolerance."""


class FitError(BorelInvError, RuntimeError):
    """No finite constant certifies a bound on the sampled grid."""


class MomentTableGap(BorelInvError, KeyError):
    """A moment needed by the Borel coefficients is missing from the table."""
