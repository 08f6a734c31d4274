"""Nabla discrete fractional calculus on the integer ray N_a = {a, a+1, ...}.

Grid functions are finite: every operator needs the full history from the
base point up to the evaluation point and raises GridRangeError otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

from .errors import GridRangeError, OrderError, PoleError
from .special import binomial_general, gamma, log_abs_gamma

__all__ = [
    "GridFunction",
    "rising_factorial",
    "nabla",
    "shift",
    "fractional_sum",
    "fractional_difference",
    "power_rule",
    "leibniz_difference",
]


@dataclass(frozen=True)
class GridFunction:
    """Real values U(base), U(base+1), ..., U(horizon)."""

    base: int
    values: tuple[float, ...]

    def __post_init__(self):
        if int(self.base) != self.base:
            raise ValueError(f"base must be an integer, got {self.base!r}")
        if len(self.values) == 0:
            raise ValueError("a grid function needs at least one value")
        object.__setattr__(self, "base", int(self.base))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def horizon(self) -> int:
        return self.base + len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def __call__(self, t: int) -> float:
        if t < self.base or t > self.horizon:
            raise GridRangeError(
                f"t={t} outside the support [{self.base}, {self.horizon}]"
            )
        return self.values[t - self.base]

    def points(self) -> range:
        return range(self.base, self.horizon + 1)

    @classmethod
    def from_callable(cls, fn: Callable[[int], float], base: int, horizon: int) -> "GridFunction":
        if horizon < base:
            raise ValueError(f"horizon {horizon} precedes base {base}")
        return cls(base, tuple(fn(t) for t in range(base, horizon + 1)))

    @classmethod
    def constant(cls, value: float, base: int, horizon: int) -> "GridFunction":
        return cls.from_callable(lambda _t: value, base, horizon)

    def map(self, fn: Callable[[float], float]) -> "GridFunction":
        return GridFunction(self.base, tuple(fn(v) for v in self.values))

    def combine(self, other: "GridFunction", op: Callable[[float, float], float]) -> "GridFunction":
        """Pointwise op on the common support of two grid functions."""
        lo = max(self.base, other.base)
        hi = min(self.horizon, other.horizon)
        if hi < lo:
            raise GridRangeError("grid functions have disjoint supports")
        return GridFunction(lo, tuple(op(self(t), other(t)) for t in range(lo, hi + 1)))

    def __add__(self, other: "GridFunction") -> "GridFunction":
        return self.combine(other, lambda u, v: u + v)

    def __mul__(self, other):
        if isinstance(other, GridFunction):
            return self.combine(other, lambda u, v: u * v)
        return self.map(lambda u: u * other)

    __rmul__ = __mul__

    def restrict(self, base: int) -> "GridFunction":
        """The same function viewed on N_base (base must lie inside the support)."""
        if base < self.base or base > self.horizon:
            raise GridRangeError(f"cannot restrict to base {base}")
        return GridFunction(base, self.values[base - self.base:])


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def rising_factorial(t: float, nu: float) -> float:
    """t to the nu rising, Gamma(t+nu)/Gamma(t), with 0 rising anything = 0.

    Computed from log-gamma differences with sign tracking so that large
    arguments do not overflow.
    """
    t, nu = float(t), float(nu)
    if nu == 0.0:
        return 1.0
    if t == 0.0:
        return 0.0
    if _is_nonpositive_integer(t):
        raise PoleError(f"rising factorial undefined at negative integer t={t!r}")
    if _is_nonpositive_integer(t + nu):
        raise PoleError(f"rising factorial has a pole: t+nu={t + nu!r}")
    if nu == math.floor(nu) and 0 < nu <= 64:
        acc = 1.0
        for k in range(int(nu)):
            acc *= t + k
        return acc
    num, s_num = log_abs_gamma(t + nu)
    den, s_den = log_abs_gamma(t)
    return s_num * s_den * math.exp(num - den)


def _check_support(U: GridFunction, lo: int, hi: int) -> None:
    if lo < U.base or hi > U.horizon:
        raise GridRangeError(
            f"needs U on [{lo}, {hi}], support is [{U.base}, {U.horizon}]"
        )


def nabla(U: GridFunction, t: int, n: int = 1) -> float:
    """n-th backward difference of U at t."""
    if n < 0:
        raise OrderError(f"nabla power must be nonnegative, got {n}")
    _check_support(U, t - n, t)
    acc = 0.0
    coef = 1.0
    for k in range(n + 1):
        acc += coef * U(t - k)
        coef *= -(n - k) / (k + 1)
    return acc


def shift(U: GridFunction, t: int, n: int) -> float:
    """E^n U(t) = U(t + n)."""
    return U(t + n)


def sum_kernel(nu: float, length: int) -> list[float]:
    """Weights w[j] = (j+1)^{nu-1 rising} / Gamma(nu) for j = 0 .. length-1.

    w[0] = 1 and w[j] = w[j-1] (j + nu - 1) / j, the ratio of consecutive
    rising factorials; this never overflows and is exact for dyadic nu.
    """
    w = [1.0] * length
    for j in range(1, length):
        w[j] = w[j - 1] * (j + nu - 1.0) / j
    return w


def fractional_sum(U: GridFunction, nu: float, t: int) -> float:
    """Order-nu nabla fractional sum of U based at U.base, evaluated at t."""
    nu = float(nu)
    if not nu > 0:
        raise OrderError(f"fractional sum needs nu > 0, got {nu!r}")
    _check_support(U, U.base, t)
    w = sum_kernel(nu, t - U.base + 1)
    return math.fsum(w[t - s] * U(s) for s in range(U.base, t + 1))


def _apply_order(U: GridFunction, order: float, t: int) -> float:
    """Signed-order dispatcher: order < 0 sums, order = 0 identity, order > 0 differences."""
    if order == 0.0:
        return U(t)
    if order < 0:
        return fractional_sum(U, -order, t)
    return fractional_difference(U, order, t)


def fractional_difference(U: GridFunction, nu: float, t: int) -> float:
    """Order-nu nabla fractional difference: nabla^n of the (n - nu)-order sum, n = ceil(nu)."""
    nu = float(nu)
    if not nu > 0:
        raise OrderError(f"fractional difference needs nu > 0, got {nu!r}")
    n = math.ceil(nu)
    if n == nu:
        return nabla(U, t, n)
    _check_support(U, t - n, t)
    inner = GridFunction.from_callable(
        lambda s: fractional_sum(U, n - nu, s), t - n, t
    )
    return nabla(inner, t, n)


def power_rule(nu: float, upsilon: float, a: int, t: int) -> float:
    """Closed form of the order-nu sum of (t-a+1)^{upsilon rising} based at a."""
    if not nu > 0:
        raise OrderError(f"power rule needs nu > 0, got {nu!r}")
    if t < a:
        raise GridRangeError(f"t={t} is not in N_{a}")
    return gamma(upsilon + 1.0) / gamma(nu + upsilon + 1.0) * rising_factorial(
        t - a + 1, nu + upsilon
    )


def leibniz_difference(U: GridFunction, Y: GridFunction, nu: float, t: int) -> float:
    """Order-nu difference of the product UY at t via the fractional Leibniz sum.

    Both functions live on N_0. Terms whose binomial coefficient vanishes
    (integer nu) are skipped; terms with nu - n < 0 are fractional sums of
    order n - nu.
    """
    if U.base != 0 or Y.base != 0:
        raise GridRangeError("Leibniz rule is stated for functions on N_0")
    if not nu > 0:
        raise OrderError(f"Leibniz rule needs nu > 0, got {nu!r}")
    if t < 1:
        raise GridRangeError(f"Leibniz rule evaluates at positive t, got {t}")
    terms = []
    for n in range(t + 1):
        coef = binomial_general(nu, n)
        if coef == 0.0:
            continue
        terms.append(coef * _apply_order(U, nu - n, t - n) * nabla(Y, t, n))
    return math.fsum(terms)


def iterate_sum(U: GridFunction, nu: float) -> GridFunction:
    """The whole sequence t -> fractional_sum(U, nu, t) on U's support."""
    return GridFunction.from_callable(
        lambda s: fractional_sum(U, nu, s), U.base, U.horizon
    )


def backward_difference_function(U: GridFunction) -> GridFunction:
    """nabla U as a grid function on N_{base+1}."""
    if len(U) < 2:
        raise GridRangeError("need at least two points to difference")
    return GridFunction.from_callable(lambda s: nabla(U, s, 1), U.base + 1, U.horizon)


def sequence(values: Sequence[float], base: int = 0) -> GridFunction:
    return GridFunction(base, tuple(values))
