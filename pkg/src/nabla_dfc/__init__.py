"""Nabla discrete fractional calculus, Riemann-Liouville operators and
fractional-form particular solutions of the radial Schrodinger equation."""

from .dfc import (
    GridFunction,
    fractional_difference,
    fractional_sum,
    leibniz_difference,
    nabla,
    power_rule,
    rising_factorial,
    shift,
)
from .errors import (
    BranchUnavailableError,
    ConvergenceError,
    DFCError,
    DomainError,
    GridRangeError,
    IntegrabilityError,
    OrderError,
    PoleError,
    ValidationError,
)
from .rl import (
    ExpPowerTerm,
    FunctionSum,
    Kummer,
    StructuredFunction,
    integer_derivative,
    rl_apply,
    rl_exp_power_closed_form,
    rl_integral_quadrature,
)
from .schrodinger import (
    BranchDerivation,
    EquationParams,
    PhysicalParams,
    SolutionRecord,
    construct_solution,
    derive_branches,
    evaluate_solution,
    map_physical,
)
from .special import binomial_general, gamma, kummer_1f1, log_gamma
from .verify import identity_suite, ode_residual, representation_equivalence

__version__ = "0.1.0"
