"""Riemann-Liouville operators (base point 0) on the family kappa * e^{c r} * r^p.

The closed form of the order-mu integral of e^{c r} r^p is

    Gamma(p+1)/Gamma(p+mu+1) * r^{p+mu} * 1F1(p+1; p+mu+1; c r),

and derivatives of such normal forms stay inside a small algebra: finite sums
of exp-power terms, each optionally carrying a 1F1 factor whose parameters
shift by one per differentiation. ``rl_integral_quadrature`` is an
independent numerical route used to cross-check the closed forms.
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Union

from scipy import integrate

from .errors import ConvergenceError, DomainError, IntegrabilityError, OrderError
from .special import kummer_1f1, log_gamma

__all__ = [
    "ExpPowerTerm",
    "Kummer",
    "StructuredFunction",
    "FunctionSum",
    "rl_integral_quadrature",
    "rl_exp_power_closed_form",
    "integer_derivative",
    "differentiate",
    "rl_apply",
    "function_from_dict",
]

QUAD_ATOL = 1e-8
QUAD_RTOL = 1e-10


@dataclass(frozen=True)
class ExpPowerTerm:
    """kappa * e^{c r} * r^p."""

    kappa: float
    c: float
    p: float

    def __post_init__(self):
        for name in ("kappa", "c", "p"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise DomainError(f"ExpPowerTerm.{name} must be finite, got {v!r}")
            object.__setattr__(self, name, v)

    def evaluate(self, r: float) -> float:
        if self.kappa == 0.0:
            return 0.0
        if r <= 0:
            if r == 0 and self.p > 0:
                return 0.0
            if r == 0 and self.p == 0:
                return self.kappa
            raise DomainError(f"exp-power term evaluated at r={r!r}")
        return self.kappa * math.exp(self.c * r + self.p * math.log(r))

    __call__ = evaluate

    def derivative(self) -> tuple["ExpPowerTerm", ...]:
        out = []
        if self.c != 0.0:
            out.append(ExpPowerTerm(self.kappa * self.c, self.c, self.p))
        if self.p != 0.0:
            out.append(ExpPowerTerm(self.kappa * self.p, self.c, self.p - 1.0))
        return tuple(out)

    def times(self, other: "ExpPowerTerm") -> "ExpPowerTerm":
        return ExpPowerTerm(self.kappa * other.kappa, self.c + other.c, self.p + other.p)

    def scaled(self, k: float) -> "ExpPowerTerm":
        return ExpPowerTerm(self.kappa * k, self.c, self.p)

    def to_dict(self) -> dict:
        return {"kappa": self.kappa, "c": self.c, "p": self.p}

    @classmethod
    def from_dict(cls, d: dict) -> "ExpPowerTerm":
        return cls(d["kappa"], d["c"], d["p"])


@dataclass(frozen=True)
class Kummer:
    """The factor 1F1(a; b; scale * r)."""

    a: float
    b: float
    scale: float

    def __post_init__(self):
        for name in ("a", "b", "scale"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.b <= 0 and self.b == math.floor(self.b):
            raise DomainError(f"1F1 factor needs b off the non-positive integers, got {self.b!r}")

    def evaluate(self, r: float) -> float:
        return kummer_1f1(self.a, self.b, self.scale * r)

    def shifted(self) -> "Kummer":
        return Kummer(self.a + 1.0, self.b + 1.0, self.scale)

    @property
    def derivative_factor(self) -> float:
        # d/dr 1F1(a;b;s r) = (a s / b) 1F1(a+1; b+1; s r)
        return self.a * self.scale / self.b

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "scale": self.scale}

    @classmethod
    def from_dict(cls, d: dict) -> "Kummer":
        return cls(d["a"], d["b"], d["scale"])


def _merge_terms(terms) -> tuple[ExpPowerTerm, ...]:
    acc: dict[tuple[float, float], float] = defaultdict(float)
    for term in terms:
        acc[(term.c, term.p)] += term.kappa
    merged = [ExpPowerTerm(k, c, p) for (c, p), k in acc.items() if k != 0.0]
    merged.sort(key=lambda t: (t.c, t.p))
    return tuple(merged)


@dataclass(frozen=True)
class StructuredFunction:
    """Sum of exp-power terms, optionally multiplied by one 1F1 factor.

    With a factor present the sum is a single term (the normal form
    kappa e^{c r} r^p 1F1(a; b; s r)).
    """

    terms: tuple[ExpPowerTerm, ...]
    hypergeometric_factor: Kummer | None = None

    def __post_init__(self):
        merged = _merge_terms(self.terms)
        object.__setattr__(self, "terms", merged)
        if self.hypergeometric_factor is not None and len(merged) > 1:
            raise DomainError("a 1F1-carrying structured function must have exactly one term")

    @classmethod
    def of(cls, *terms: ExpPowerTerm) -> "StructuredFunction":
        return cls(tuple(terms))

    @property
    def is_exp_power_sum(self) -> bool:
        return self.hypergeometric_factor is None

    def evaluate(self, r: float) -> float:
        base = math.fsum(t.evaluate(r) for t in self.terms)
        if self.hypergeometric_factor is None or base == 0.0:
            return base
        return base * self.hypergeometric_factor.evaluate(r)

    __call__ = evaluate

    def times(self, term: ExpPowerTerm) -> "StructuredFunction":
        return StructuredFunction(tuple(t.times(term) for t in self.terms), self.hypergeometric_factor)

    def scaled(self, k: float) -> "StructuredFunction":
        return StructuredFunction(tuple(t.scaled(k) for t in self.terms), self.hypergeometric_factor)

    def derivative(self) -> Union["StructuredFunction", "FunctionSum"]:
        parts = [t for term in self.terms for t in term.derivative()]
        F = self.hypergeometric_factor
        if F is None:
            return StructuredFunction(tuple(parts))
        pieces = [StructuredFunction((t,), F) for t in parts]
        k = F.derivative_factor
        if k != 0.0:
            pieces.extend(StructuredFunction((t.scaled(k),), F.shifted()) for t in self.terms)
        return FunctionSum(tuple(pieces)).simplified()

    def to_dict(self) -> dict:
        return {
            "terms": [t.to_dict() for t in self.terms],
            "f1f1": None if self.hypergeometric_factor is None else self.hypergeometric_factor.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StructuredFunction":
        factor = d.get("f1f1")
        return cls(
            tuple(ExpPowerTerm.from_dict(t) for t in d["terms"]),
            None if factor is None else Kummer.from_dict(factor),
        )


@dataclass(frozen=True)
class FunctionSum:
    """Finite sum of structured functions, closed under differentiation."""

    parts: tuple[StructuredFunction, ...] = field(default_factory=tuple)

    def simplified(self) -> Union[StructuredFunction, "FunctionSum"]:
        plain: list[ExpPowerTerm] = []
        by_factor: dict[Kummer, list[ExpPowerTerm]] = defaultdict(list)
        for part in self.parts:
            if part.hypergeometric_factor is None:
                plain.extend(part.terms)
            else:
                by_factor[part.hypergeometric_factor].extend(part.terms)
        out = []
        merged_plain = _merge_terms(plain)
        if merged_plain:
            out.append(StructuredFunction(merged_plain))
        for factor, terms in by_factor.items():
            out.extend(StructuredFunction((t,), factor) for t in _merge_terms(terms))
        if len(out) == 1:
            return out[0]
        if not out:
            return StructuredFunction(())
        return FunctionSum(tuple(out))

    def evaluate(self, r: float) -> float:
        return math.fsum(p.evaluate(r) for p in self.parts)

    __call__ = evaluate

    def times(self, term: ExpPowerTerm) -> "FunctionSum":
        return FunctionSum(tuple(p.times(term) for p in self.parts))

    def scaled(self, k: float) -> "FunctionSum":
        return FunctionSum(tuple(p.scaled(k) for p in self.parts))

    def derivative(self) -> Union[StructuredFunction, "FunctionSum"]:
        pieces: list[StructuredFunction] = []
        for part in self.parts:
            d = part.derivative()
            pieces.extend(d.parts if isinstance(d, FunctionSum) else (d,))
        return FunctionSum(tuple(pieces)).simplified()

    def to_dict(self) -> dict:
        return {"sum": [p.to_dict() for p in self.parts]}


Structured = Union[StructuredFunction, FunctionSum]


def function_from_dict(d: dict) -> Structured:
    if "sum" in d:
        return FunctionSum(tuple(StructuredFunction.from_dict(p) for p in d["sum"]))
    return StructuredFunction.from_dict(d)


def differentiate(f: Structured, n: int = 1) -> Structured:
    """Exact n-th derivative inside the structured algebra."""
    if n < 0:
        raise OrderError(f"derivative order must be nonnegative, got {n}")
    for _ in range(n):
        f = f.derivative()
    return f


def integer_derivative(f: StructuredFunction | ExpPowerTerm, n: int) -> StructuredFunction:
    """Exact n-th derivative of a plain exp-power sum."""
    if isinstance(f, ExpPowerTerm):
        f = StructuredFunction((f,))
    if f.hypergeometric_factor is not None:
        raise DomainError("integer_derivative takes exp-power sums; use differentiate() for 1F1 forms")
    out = differentiate(f, int(n))
    assert isinstance(out, StructuredFunction)
    return out


def _as_term_list(f) -> list[tuple[ExpPowerTerm, Kummer | None]]:
    if isinstance(f, ExpPowerTerm):
        return [(f, None)]
    if isinstance(f, StructuredFunction):
        return [(t, f.hypergeometric_factor) for t in f.terms]
    if isinstance(f, FunctionSum):
        return [pair for part in f.parts for pair in _as_term_list(part)]
    raise TypeError(f"cannot integrate {type(f).__name__}")


def rl_integral_quadrature(f, mu: float, r: float) -> float:
    """Order-mu Riemann-Liouville integral from 0 to r, by quadrature.

    After s = r u every term becomes r^{p+mu} / Gamma(mu) times the integral
    of u^p (1-u)^{mu-1} g(u) over [0, 1] with g smooth, which QUADPACK's
    algebraic-weight rule (QAWS) integrates adaptively.
    """
    mu, r = float(mu), float(r)
    if not mu > 0:
        raise OrderError(f"RL integral needs mu > 0, got {mu!r}")
    if not r > 0:
        raise DomainError(f"RL integral evaluated at r={r!r}")
    total = []
    for term, factor in _as_term_list(f):
        if term.p <= -1:
            raise IntegrabilityError(f"s^{term.p} is not integrable at 0")
        c = term.c
        if factor is None:
            def smooth(u, c=c):
                return math.exp(c * r * u)
        else:
            def smooth(u, c=c, F=factor):
                return math.exp(c * r * u) * F.evaluate(r * u)
        val, err = integrate.quad(
            smooth, 0.0, 1.0, weight="alg", wvar=(term.p, mu - 1.0),
            epsabs=0.0, epsrel=1e-13, limit=200,
        )
        # math.gamma on purpose: keeps this route independent of special.gamma
        scale = term.kappa * r ** (term.p + mu) / math.gamma(mu)
        if abs(err * scale) > QUAD_ATOL + QUAD_RTOL * abs(val * scale):
            raise ConvergenceError(
                f"RL quadrature error estimate {abs(err * scale):.3e} above tolerance"
            )
        total.append(val * scale)
    return math.fsum(total)


def rl_exp_power_closed_form(c: float, p: float, mu: float) -> StructuredFunction:
    """Order-mu RL integral of e^{c r} r^p as its 1F1 normal form."""
    c, p, mu = float(c), float(p), float(mu)
    if not mu > 0:
        raise OrderError(f"closed form needs mu > 0, got {mu!r}")
    if p <= -1:
        raise IntegrabilityError(f"r^{p} is not integrable at 0")
    b = p + mu + 1.0
    kappa = math.exp(log_gamma(p + 1.0) - log_gamma(b))
    term = ExpPowerTerm(kappa, 0.0, p + mu)
    if c == 0.0:
        return StructuredFunction((term,))
    return StructuredFunction((term,), Kummer(p + 1.0, b, c))


def _is_integer(x: float) -> bool:
    return x == math.floor(x)


def rl_apply(f: ExpPowerTerm, order: float) -> Structured:
    """[f]_order: integral for order < 0, exact derivative otherwise.

    Positive non-integer orders differentiate the (n - order)-order integral
    n = ceil(order) times through the 1F1 recurrence, so the result may be a
    FunctionSum rather than a single normal form.
    """
    order = float(order)
    if order == 0.0:
        return StructuredFunction((f,))
    if order > 0 and _is_integer(order):
        return integer_derivative(f, int(order))
    if order < 0:
        return rl_exp_power_closed_form(f.c, f.p, -order).scaled(f.kappa)
    if f.p <= -1:
        raise IntegrabilityError(
            f"RL derivative of order {order} needs p > -1, got p={f.p}"
        )
    n = math.ceil(order)
    base = rl_exp_power_closed_form(f.c, f.p, n - order).scaled(f.kappa)
    return differentiate(base, n)
