"""Verification harness: ODE residuals, representation checks and the identity suite."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from types import ModuleType, SimpleNamespace
from typing import Sequence

import numpy as np

from . import dfc
from .errors import DomainError
from .rl import (
    ExpPowerTerm,
    Kummer,
    Structured,
    StructuredFunction,
    differentiate,
    integer_derivative,
    rl_integral_quadrature,
)
from .schrodinger import BranchDerivation, EquationParams, SolutionRecord, evaluate_solution

__all__ = [
    "DEFAULT_GRID",
    "ResidualReport",
    "EquivalenceResult",
    "CheckResult",
    "SuiteReport",
    "ode_residual",
    "representation_equivalence",
    "ReducedEquation",
    "reduced_equation",
    "reduced_residual",
    "identity_suite",
]

DEFAULT_GRID = (0.5, 1.0, 2.0, 5.0)

# (check name, tolerance); the mixed error is |x - y| / max(1, |y|)
IDENTITY_TOLERANCES = {
    "monomial_difference": 1e-10,
    "sum_composition": 1e-9,
    "linearity": 1e-12,
    "difference_of_sum": 1e-9,
    "initial_term_interchange": 1e-9,
    "power_rule": 1e-9,
    "shifted_base": 1e-9,
    "leibniz": 1e-9,
    "integer_collapse": 1e-15,
}


def _check_grid(grid: Sequence[float]) -> tuple[float, ...]:
    g = tuple(float(r) for r in grid)
    if not g:
        raise DomainError("empty verification grid")
    if any(r <= 0 for r in g):
        raise DomainError("verification grid must be strictly positive")
    if any(b <= a for a, b in zip(g, g[1:])):
        raise DomainError("verification grid must be strictly increasing")
    return g


@dataclass(frozen=True)
class ResidualReport:
    grid: tuple[float, ...]
    residuals: tuple[float, ...]
    scale: float
    relative_max: float

    def passed(self, tol: float) -> bool:
        return self.relative_max <= tol

    def to_dict(self) -> dict:
        return {
            "grid": list(self.grid),
            "residuals": list(self.residuals),
            "scale": self.scale,
            "relative_max": self.relative_max,
        }


def ode_residual(
    ep: EquationParams,
    sr: SolutionRecord | Structured,
    grid: Sequence[float] = DEFAULT_GRID,
) -> ResidualReport:
    """r^2 R'' - (alpha^2 r^2 - beta r + gamma r^{rho+2} + delta) R on a grid.

    R'' is taken by exact differentiation of the structured closed form.
    """
    g = _check_grid(grid)
    f = sr.closed_form if isinstance(sr, SolutionRecord) else sr
    f2 = differentiate(f, 2)
    residuals = []
    scale = 0.0
    for r in g:
        lhs = r * r * f2.evaluate(r)
        rhs = ep.potential_coefficient(r) * f.evaluate(r)
        residuals.append(lhs - rhs)
        scale = max(scale, abs(lhs), abs(rhs))
    worst = max(abs(x) for x in residuals)
    rel = worst / scale if scale > 0 else (0.0 if worst == 0 else math.inf)
    return ResidualReport(g, tuple(residuals), scale, rel)


@dataclass(frozen=True)
class EquivalenceResult:
    agree: bool
    max_deviation: float
    fractional_values: tuple[float, ...]
    closed_values: tuple[float, ...]


def _fractional_value(sr: SolutionRecord, r: float) -> float:
    form = sr.fractional_form
    pre = form.prefactor.evaluate(r)
    order = form.order
    if order < 0:
        return pre * rl_integral_quadrature(form.operand, -order, r)
    if order == math.floor(order):
        return pre * integer_derivative(form.operand, int(order)).evaluate(r)
    raise DomainError(
        f"no independent evaluation route for positive fractional order {order}"
    )


def representation_equivalence(
    sr: SolutionRecord, grid: Sequence[float] = DEFAULT_GRID, tol: float = 1e-6
) -> EquivalenceResult:
    """Compare the fractional form (by quadrature or exact derivative) with the closed form."""
    g = _check_grid(grid)
    frac = tuple(_fractional_value(sr, r) for r in g)
    closed = tuple(evaluate_solution(sr, r) for r in g)
    # relative per point, floored so exact zeros of the solution stay well-posed
    floor = 1e-9 * max(abs(y) for y in closed) or 1.0
    worst = 0.0
    for x, y in zip(frac, closed):
        worst = max(worst, abs(x - y) / max(abs(y), floor))
    return EquivalenceResult(worst <= tol, worst, frac, closed)


@dataclass(frozen=True)
class ReducedEquation:
    """r Y'' + (2 sig r + 2 lam) Y' + (coef_r r + coef_0 + coef_inv / r) Y = 0."""

    lam: float
    sigma: float
    coef_r: float
    coef_0: float
    coef_inv: float

    def kummer_parameters(self) -> tuple[float, float, float] | None:
        """(a, b, scale) of the regular Kummer solution, or None if b is a pole."""
        b = 2.0 * self.lam
        if b <= 0 and b == math.floor(b):
            return None
        return self.coef_0 / (2.0 * self.sigma), b, -2.0 * self.sigma


def reduced_equation(bd: BranchDerivation, sigma_sign: int, lam_sign: int) -> ReducedEquation:
    """Coefficients left after substituting R = r^lam e^{sig r} Y into the radial equation.

    With the derived lam and sig the r Y and Y/r coefficients vanish and the
    constant one is 2 sig lam + numerator.
    """
    K, L, M = bd.equation.radial_coefficients()
    sig = sigma_sign * bd.rate
    lam = bd.lam(lam_sign)
    return ReducedEquation(
        lam=lam,
        sigma=sig,
        coef_r=sig * sig - K,
        coef_0=2.0 * sig * lam - L,
        coef_inv=lam * (lam - 1.0) - M,
    )


def reduced_residual(red: ReducedEquation, grid: Sequence[float] = DEFAULT_GRID) -> float | None:
    """Relative residual of the reduced equation on its Kummer solution."""
    params = red.kummer_parameters()
    if params is None:
        return None
    Y = StructuredFunction((ExpPowerTerm(1.0, 0.0, 0.0),), Kummer(*params))
    Y1 = differentiate(Y, 1)
    Y2 = differentiate(Y, 2)
    worst, scale = 0.0, 0.0
    for r in _check_grid(grid):
        pieces = (
            r * Y2(r),
            (2 * red.sigma * r + 2 * red.lam) * Y1(r),
            (red.coef_r * r + red.coef_0 + red.coef_inv / r) * Y(r),
        )
        worst = max(worst, abs(math.fsum(pieces)))
        scale = max(scale, *(abs(x) for x in pieces))
    return worst / scale if scale else 0.0


# --------------------------------------------------------------------------
# identity suite


@dataclass
class CheckResult:
    name: str
    tolerance: float
    max_error: float = 0.0
    trials: int = 0
    # sensitivity checks pass when the error is *above* the tolerance
    expect_exceed: bool = False

    def __post_init__(self):
        self.max_error = float(self.max_error)

    @property
    def passed(self) -> bool:
        if self.expect_exceed:
            return bool(self.max_error > self.tolerance)
        return bool(self.max_error <= self.tolerance)

    def record(self, got: float, expected: float) -> None:
        err = float(abs(got - expected) / max(1.0, abs(expected)))
        if not math.isfinite(err):
            err = math.inf
        self.max_error = max(self.max_error, err)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "max_error": self.max_error,
            "tolerance": self.tolerance,
            "pass": self.passed,
        }


@dataclass
class SuiteReport:
    seed: int
    trials: int
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "checks": [c.to_dict() for c in self.checks],
            "seed": self.seed,
            "trials": self.trials,
            "pass": self.passed,
        }


def _random_grid(rng: np.random.Generator, base: int, lo: int, hi: int, low=-1.0, high=1.0):
    n = int(rng.integers(lo, hi + 1))
    return dfc.GridFunction(base, tuple(rng.uniform(low, high, size=n)))


def identity_suite(
    seed: int = 42,
    trials: int = 200,
    kernel: ModuleType | SimpleNamespace = dfc,
    tolerances: dict[str, float] | None = None,
) -> SuiteReport:
    """Randomized check of the nabla-calculus identities.

    ``kernel`` supplies the operators under test (the dfc module by default);
    swapping one attribute for a broken version must make its entry fail.
    Every check draws from its own generator spawned off ``seed``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    tol = dict(IDENTITY_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    k = kernel
    report = SuiteReport(seed, trials)
    streams = np.random.SeedSequence(seed).spawn(len(tol))
    rngs = {name: np.random.default_rng(s) for name, s in zip(tol, streams)}

    def new(name):
        c = CheckResult(name, tol[name], trials=trials)
        report.checks.append(c)
        return c, rngs[name]

    c, rng = new("monomial_difference")
    for _ in range(trials):
        nu = rng.uniform(0.1, 4.0)
        t = int(rng.integers(2, 11))
        U = k.GridFunction.from_callable(lambda s: k.rising_factorial(s, nu), 1, t)
        c.record(k.nabla(U, t, 1), nu * k.rising_factorial(t, nu - 1.0))

    c, rng = new("sum_composition")
    for _ in range(trials):
        U = _random_grid(rng, 0, 1, 12)
        nu, up = rng.uniform(0.01, 3.0, size=2)
        t = int(rng.integers(0, U.horizon + 1))
        direct = k.fractional_sum(U, nu + up, t)
        inner_up = k.GridFunction.from_callable(lambda s: k.fractional_sum(U, up, s), 0, t)
        inner_nu = k.GridFunction.from_callable(lambda s: k.fractional_sum(U, nu, s), 0, t)
        c.record(k.fractional_sum(inner_up, nu, t), direct)
        c.record(k.fractional_sum(inner_nu, up, t), direct)

    c, rng = new("linearity")
    for _ in range(trials):
        U = _random_grid(rng, 0, 4, 12)
        Y = k.GridFunction(0, tuple(rng.uniform(-1, 1, size=len(U))))
        b, cc = rng.uniform(-5, 5, size=2)
        nu = rng.uniform(0.01, 3.0)
        t = int(rng.integers(math.ceil(nu), U.horizon + 1))
        combo = k.GridFunction(0, tuple(b * u + cc * y for u, y in zip(U.values, Y.values)))
        c.record(
            k.fractional_difference(combo, nu, t),
            b * k.fractional_difference(U, nu, t) + cc * k.fractional_difference(Y, nu, t),
        )

    c, rng = new("difference_of_sum")
    for _ in range(trials):
        U = _random_grid(rng, 0, 2, 12)
        nu = rng.uniform(1.0, 3.0)
        t = int(rng.integers(1, U.horizon + 1))
        summed = k.GridFunction.from_callable(lambda s: k.fractional_sum(U, nu, s), 0, t)
        c.record(k.nabla(summed, t, 1), k.fractional_sum(U, nu - 1.0, t))

    c, rng = new("initial_term_interchange")
    for _ in range(trials):
        t = int(rng.integers(2, 11))
        U = k.GridFunction(0, tuple(rng.uniform(-1, 1, size=t + 1)))
        nu = rng.uniform(0.01, 0.99)
        # nabla U lives on N_1, so both fractional operators are based at 1
        dU = k.GridFunction.from_callable(lambda s: k.nabla(U, s, 1), 1, t)
        lhs = k.fractional_sum(dU, nu, t)
        rhs = k.fractional_difference(U.restrict(1), 1.0 - nu, t) - k.binomial_general(
            t + nu - 2.0, t - 1
        ) * U(0)
        c.record(lhs, rhs)

    c, rng = new("power_rule")
    for _ in range(trials):
        nu = rng.uniform(0.01, 3.0)
        up = rng.uniform(-0.9, 3.0)
        a = int(rng.integers(-3, 4))
        t = a + int(rng.integers(0, 11))
        U = k.GridFunction.from_callable(lambda s: k.rising_factorial(s - a + 1, up), a, t)
        c.record(k.fractional_sum(U, nu, t), k.power_rule(nu, up, a, t))

    c, rng = new("shifted_base")
    for _ in range(trials):
        a = int(rng.integers(-3, 4))
        U = _random_grid(rng, a, 2, 12)
        nu = rng.uniform(0.01, 3.0)
        t = int(rng.integers(a + 1, U.horizon + 1))
        dU = k.GridFunction.from_callable(lambda s: k.nabla(U, s, 1), a + 1, t)
        summed = k.GridFunction.from_callable(lambda s: k.fractional_sum(U, nu, s), a, t)
        rhs = k.nabla(summed, t, 1) - k.rising_factorial(t - a + 1, nu - 1.0) / k.gamma(nu) * U(a)
        c.record(k.fractional_sum(dU, nu, t), rhs)

    c, rng = new("leibniz")
    for _ in range(trials):
        U = _random_grid(rng, 0, 4, 12)
        Y = k.GridFunction(0, tuple(rng.uniform(-1, 1, size=len(U))))
        nu = rng.uniform(0.01, 3.0)
        t = int(rng.integers(max(1, math.ceil(nu)), U.horizon + 1))
        product = k.GridFunction(0, tuple(u * y for u, y in zip(U.values, Y.values)))
        c.record(k.leibniz_difference(U, Y, nu, t), k.fractional_difference(product, nu, t))

    c, rng = new("integer_collapse")
    for _ in range(trials):
        U = _random_grid(rng, 0, 4, 12)
        n = int(rng.integers(1, 4))
        t = int(rng.integers(n, U.horizon + 1))
        c.record(k.fractional_difference(U, float(n), t), k.nabla(U, t, n))

    return report
