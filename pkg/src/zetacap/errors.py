"""Exception taxonomy shared by all zetacap modules.

Every failure mode that callers are expected to branch on gets its own
class; anything else propagates as the underlying ValueError/ArithmeticError.
"""


class ZetacapError(Exception):
    """Base class for all library-specific errors."""


class DomainError(ZetacapError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnsupportedDimension(DomainError):
    """Base dimension d outside the supported range [2, 8]."""


class PoleAtOne(ZetacapError, ZeroDivisionError):
    """Zeta function evaluated at its simple pole s = 1."""


class PoleHit(ZetacapError, ZeroDivisionError):
    """Base zeta evaluated at one of its half-integer poles."""


class Divergence(ZetacapError, ArithmeticError):
    """Series or transformation cannot reach the target tolerance."""


class Overflow(ZetacapError, OverflowError):
    """Requested non-log evaluation exceeds representable range."""


class NonPositiveValue(ZetacapError, ArithmeticError):
    """Logarithm requested of a function value that is not positive.

    For Legendre/hypergeometric evaluations this usually means the
    parameters sit at or beyond a Dirichlet root.
    """


class NonPositive(NonPositiveValue):
    """Alias used by integrand-level checks (kept distinct for filtering)."""


class BasisOverflow(ZetacapError, ArithmeticError):
    """Recurrence result leaves the closed arctan/log term basis."""


class DescriptorMismatch(ZetacapError, ArithmeticError):
    """Claimed asymptotic descriptor disagrees with sampled function values."""


class SingularDeterminant(ZetacapError, ArithmeticError):
    """The zeta-regularized determinant does not exist for these parameters."""


class QuadratureFailure(ZetacapError, ArithmeticError):
    """Adaptive quadrature failed to meet its error target."""


class DifferentiationUnstable(ZetacapError, ArithmeticError):
    """Numerical derivative estimates disagree beyond tolerance."""


class BracketFailure(ZetacapError, ArithmeticError):
    """Root scan could not bracket the expected number of sign changes."""


class TailBoundTooLarge(ZetacapError, ArithmeticError):
    """Truncation tail estimate exceeds the requested accuracy."""
