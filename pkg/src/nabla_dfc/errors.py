"""Exception hierarchy shared by every module of the package."""


class DFCError(Exception):
    """Base class for all computation errors raised by nabla_dfc."""


class PoleError(DFCError, ValueError):
    """Argument sits on a pole of the gamma function."""


class DomainError(DFCError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class OrderError(DomainError):
    """Fractional order not admissible for the requested operator."""


class IntegrabilityError(DomainError):
    """Integrand not integrable at the lower limit."""


class GridRangeError(DFCError, IndexError):
    """Grid function evaluated outside its support."""


class ConvergenceError(DFCError, ArithmeticError):
    """Series or quadrature failed to reach its tolerance."""


class BranchUnavailableError(DFCError):
    """No evaluable representation exists for a solution branch."""


class ValidationError(DFCError, ValueError):
    """Parameter set violates a documented invariant."""
