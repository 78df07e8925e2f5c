"""Exception types raised across the package."""


class KratzerError(Exception):
    """Base class for all package errors."""


class PoleError(KratzerError, ZeroDivisionError):
    """Argument sits on a pole of Gamma, digamma or a hypergeometric parameter."""


class NonConvergence(KratzerError, ArithmeticError):
    """A series, continuation or quadrature did not reach its tolerance."""


class NumericOverflow(KratzerError, OverflowError):
    """A result is too large to represent as a finite double."""


class BranchError(KratzerError, ValueError):
    """Argument lies outside the principal sector used by the library."""


class InvalidCoupling(KratzerError, ValueError):
    """Coupling constants or reference scale violate the model invariants."""


class DomainError(KratzerError, ValueError):
    """A coordinate or energy lies outside the admissible domain."""


class InvalidSolution(KratzerError, ValueError):
    """A solution tag was requested for a range where it is not defined."""


class IllConditioned(KratzerError, ArithmeticError):
    """A least-squares fit cannot separate the asymptotic forms."""


class ThresholdCase(KratzerError, ValueError):
    """The request sits exactly on a zero-energy threshold."""


class NotApplicable(KratzerError, ValueError):
    """The quantity is not defined for this range or sign of g1."""


class PoleProximity(KratzerError, ArithmeticError):
    """Characteristic function evaluated too close to one of its poles."""


class BracketFailure(KratzerError, ArithmeticError):
    """A root bracket did not show the expected sign change."""


class OnSpectrum(KratzerError, ValueError):
    """Spectral parameter coincides with a discrete eigenvalue."""


class StepFailure(KratzerError, ArithmeticError):
    """The ODE integrator failed to advance."""
