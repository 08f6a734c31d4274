"""Particular solutions of the radial equation r^2 R'' - (K r^2 + L r + M) R = 0.

The family comes from the potential a/r^2 - b/r + c r^rho with rho in
{0, -1, -2}. Substituting R = r^lam e^{sig r} Y with lam(lam-1) = M and
sig^2 = K leaves a Kummer-type equation for Y whose fractional-order solution
is written as

    R = e^{sig r} r^lam [ e^{-2 sig r} r^{-(2 lam + k)} ]_{-(1 + k)}

for a branch constant k. Four branches I..IV come from the sign choices of
lam and sig.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .errors import BranchUnavailableError, DFCError, DomainError, ValidationError
from .rl import (
    ExpPowerTerm,
    FunctionSum,
    Structured,
    StructuredFunction,
    function_from_dict,
    rl_apply,
)

__all__ = [
    "BRANCHES",
    "PhysicalParams",
    "EquationParams",
    "BranchDerivation",
    "FractionalForm",
    "SolutionRecord",
    "map_physical",
    "derive_branches",
    "construct_solution",
    "construct_all",
    "evaluate_solution",
    "solution_to_document",
    "solution_from_document",
]

BRANCHES = ("I", "II", "III", "IV")
_CONSTANT_SYMBOL = {"I": "A", "II": "B", "III": "C", "IV": "D"}
_CONSTANT_NAME = {"I": "a", "II": "b", "III": "c", "IV": "d"}
# branch -> (sign of the exponential rate, sign in lam = (1 +/- tau)/2)
_SIGNS = {"I": (1, 1), "II": (-1, 1), "III": (1, -1), "IV": (-1, -1)}
ALLOWED_RHO = (0, -1, -2)


@dataclass(frozen=True)
class PhysicalParams:
    m: float
    hbar: float
    epsilon: float
    a_pot: float
    b_pot: float
    c_pot: float
    ell: int
    rho: int

    def __post_init__(self):
        if not (self.m > 0 and self.hbar > 0):
            raise ValidationError("mass and hbar must be positive")
        if min(self.a_pot, self.b_pot, self.c_pot) < 0:
            raise ValidationError("potential strengths must be nonnegative")
        if self.ell < 0 or int(self.ell) != self.ell:
            raise ValidationError(f"ell must be a nonnegative integer, got {self.ell!r}")
        if self.rho not in ALLOWED_RHO:
            raise ValidationError(f"rho must be one of {ALLOWED_RHO}, got {self.rho!r}")


@dataclass(frozen=True)
class EquationParams:
    """Coefficients of r^2 R'' - (alpha_sq r^2 - beta r + gamma r^{rho+2} + delta) R = 0."""

    alpha_sq: float
    beta: float
    gamma: float
    delta: float
    rho: int

    def __post_init__(self):
        for name in ("alpha_sq", "beta", "gamma", "delta"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if self.rho not in ALLOWED_RHO:
            raise ValidationError(f"rho must be one of {ALLOWED_RHO}, got {self.rho!r}")
        object.__setattr__(self, "rho", int(self.rho))
        if 1.0 + 4.0 * self.effective_delta < 0:
            raise ValidationError(
                f"1 + 4*{self.effective_delta} < 0: tau would be complex"
            )
        if not self.rate_squared > 0:
            raise ValidationError(
                f"r^2 coefficient {self.rate_squared} must be positive for a real rate"
            )

    @property
    def effective_delta(self) -> float:
        return self.gamma + self.delta if self.rho == -2 else self.delta

    @property
    def rate_squared(self) -> float:
        return self.alpha_sq + self.gamma if self.rho == 0 else self.alpha_sq

    @property
    def numerator(self) -> float:
        """The beta-like term entering the branch constants."""
        return self.beta - self.gamma if self.rho == -1 else self.beta

    def radial_coefficients(self) -> tuple[float, float, float]:
        """(K, L, M) with the equation read as r^2 R'' - (K r^2 + L r + M) R = 0."""
        return self.rate_squared, -self.numerator, self.effective_delta

    def potential_coefficient(self, r: float) -> float:
        """alpha^2 r^2 - beta r + gamma r^{rho+2} + delta, straight from the equation."""
        return self.alpha_sq * r * r - self.beta * r + self.gamma * r ** (self.rho + 2) + self.delta

    def describe(self) -> str:
        K, L, M = self.radial_coefficients()
        return f"r^2 R'' - ({K:g} r^2 {'+' if L >= 0 else '-'} {abs(L):g} r + {M:g}) R = 0"

    def to_dict(self) -> dict:
        return {
            "alpha_sq": self.alpha_sq,
            "beta": self.beta,
            "gamma": self.gamma,
            "delta": self.delta,
            "rho": self.rho,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EquationParams":
        return cls(d["alpha_sq"], d["beta"], d["gamma"], d["delta"], int(d["rho"]))


def map_physical(pp: PhysicalParams) -> EquationParams:
    """Scale the physical constants into the dimensionless equation coefficients."""
    k = 2.0 * pp.m / pp.hbar**2
    return EquationParams(
        alpha_sq=-k * pp.epsilon,
        beta=k * pp.b_pot,
        gamma=k * pp.c_pot,
        delta=k * pp.a_pot + pp.ell * (pp.ell + 1),
        rho=pp.rho,
    )


@dataclass(frozen=True)
class BranchDerivation:
    equation: EquationParams
    tau: float
    rate: float
    lambda_plus: float
    lambda_minus: float
    const_a: float
    const_b: float
    const_c: float
    const_d: float
    order_I: float
    order_II: float
    order_III: float
    order_IV: float
    # equation as supplied, when the rate override rewrote its r^2 coefficient
    source_equation: Optional[EquationParams] = None
    rate_override: Optional[float] = None

    def constant(self, branch: str) -> float:
        return getattr(self, "const_" + _CONSTANT_NAME[_check_branch(branch)])

    def order(self, branch: str) -> float:
        return getattr(self, "order_" + _check_branch(branch))

    def lam(self, sign: int) -> float:
        return self.lambda_plus if sign > 0 else self.lambda_minus

    @property
    def constants(self) -> dict[str, float]:
        return {"a": self.const_a, "b": self.const_b, "c": self.const_c, "d": self.const_d}

    def to_dict(self) -> dict:
        d = {
            "tau": self.tau,
            "rate": self.rate,
            "lambda_plus": self.lambda_plus,
            "lambda_minus": self.lambda_minus,
            "constants": self.constants,
            "orders": {b: self.order(b) for b in BRANCHES},
        }
        if self.rate_override is not None:
            d["rate_override"] = self.rate_override
            d["source_equation"] = self.source_equation.to_dict()
        return d


def _check_branch(branch: str) -> str:
    if branch not in BRANCHES:
        raise ValueError(f"branch must be one of {BRANCHES}, got {branch!r}")
    return branch


def derive_branches(ep: EquationParams, rate_override: float | None = None) -> BranchDerivation:
    """tau, lambda, rate and the four branch constants of an equation.

    The rate is sqrt(K). With ``rate_override`` the rate is taken as given and the
    equation is rebuilt with r^2 coefficient rate_override**2, which is the
    equation the resulting solutions actually satisfy.
    """
    source = None
    if rate_override is not None:
        if not rate_override > 0:
            raise DomainError(f"rate_override must be positive, got {rate_override!r}")
        source = ep
        target_k = rate_override**2
        alpha_sq = target_k - ep.gamma if ep.rho == 0 else target_k
        ep = replace(ep, alpha_sq=alpha_sq)
        rate = float(rate_override)
    else:
        rate = math.sqrt(ep.rate_squared)
    disc = 1.0 + 4.0 * ep.effective_delta
    if disc < 0:
        raise DomainError("complex tau is out of scope")
    tau = math.sqrt(disc)
    num = ep.numerator
    a = -(num + rate * (1 + tau)) / (2 * rate)
    b = (num - rate * (1 + tau)) / (2 * rate)
    c = -(num + rate * (1 - tau)) / (2 * rate)
    d = (num - rate * (1 - tau)) / (2 * rate)
    return BranchDerivation(
        equation=ep,
        tau=tau,
        rate=rate,
        lambda_plus=(1 + tau) / 2,
        lambda_minus=(1 - tau) / 2,
        const_a=a,
        const_b=b,
        const_c=c,
        const_d=d,
        # + 0.0 turns a signed zero into 0.0
        order_I=-(1 + a) + 0.0,
        order_II=-(1 + b) + 0.0,
        order_III=-(1 + c) + 0.0,
        order_IV=-(1 + d) + 0.0,
        source_equation=source,
        rate_override=None if rate_override is None else float(rate_override),
    )


@dataclass(frozen=True)
class FractionalForm:
    """prefactor * [operand]_order, e.g. e^{5r} r^{-1} [e^{-10r} r^{6/5}]_{-9/5}."""

    prefactor: ExpPowerTerm
    operand: ExpPowerTerm
    order: float
    operator_order: str
    rewritten: bool = False

    def to_dict(self) -> dict:
        return {
            "prefactor": self.prefactor.to_dict(),
            "operand": self.operand.to_dict(),
            "order": self.order,
            "operator_order": self.operator_order,
            "rewritten": self.rewritten,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "FractionalForm":
        return cls(
            ExpPowerTerm.from_dict(d["prefactor"]),
            ExpPowerTerm.from_dict(d["operand"]),
            float(d["order"]),
            d.get("operator_order", ""),
            bool(d.get("rewritten", False)),
        )


@dataclass(frozen=True)
class SolutionRecord:
    branch: str
    fractional_form: FractionalForm
    closed_form: Structured
    arbitrary_constant_symbol: str
    equation: EquationParams
    derivation: Optional[BranchDerivation] = None
    # Gamma(p+1)/Gamma(p+mu+1) when the closed form came from an RL integral
    normalization: Optional[float] = None

    def __call__(self, r: float) -> float:
        return evaluate_solution(self, r)


def _literal_form(bd: BranchDerivation, branch: str) -> FractionalForm:
    sig_sign, lam_sign = _SIGNS[branch]
    sigma = sig_sign * bd.rate
    lam = bd.lam(lam_sign)
    k = bd.constant(branch)
    name = _CONSTANT_NAME[branch]
    return FractionalForm(
        prefactor=ExpPowerTerm(1.0, sigma, lam),
        operand=ExpPowerTerm(1.0, -2.0 * sigma, -(2.0 * lam + k)),
        order=-(1.0 + k) + 0.0,
        operator_order=f"-(1+{name}E^-1)",
    )


def _swapped_form(bd: BranchDerivation, branch: str) -> FractionalForm:
    # operand power and order trade places and lam flips; for branch I this is
    # exactly branch III's literal form (c = a + tau), likewise II <-> IV
    lit = _literal_form(bd, branch)
    _, lam_sign = _SIGNS[branch]
    return FractionalForm(
        prefactor=ExpPowerTerm(1.0, lit.prefactor.c, bd.lam(-lam_sign)),
        operand=ExpPowerTerm(1.0, lit.operand.c, lit.order),
        order=lit.operand.p,
        operator_order=lit.operator_order,
        rewritten=True,
    )


def _realize(form: FractionalForm) -> tuple[Structured, Optional[float]]:
    inner = rl_apply(form.operand, form.order)
    norm = None
    if form.order < 0 and isinstance(inner, StructuredFunction) and inner.terms:
        norm = inner.terms[0].kappa
    return inner.times(form.prefactor), norm


def construct_solution(bd: BranchDerivation, branch: str) -> SolutionRecord:
    """Build branch I..IV as an evaluable closed form.

    The literal fractional form is tried first; if it has no closed form
    (operand not integrable at 0 under a fractional order) the rewritten form
    with operand power and order exchanged is used instead.
    """
    _check_branch(branch)
    failures = []
    for builder in (_literal_form, _swapped_form):
        form = builder(bd, branch)
        try:
            closed, norm = _realize(form)
        except DFCError as exc:
            failures.append(f"{'rewritten' if form.rewritten else 'literal'} form "
                            f"[r^{form.operand.p:g}]_{{{form.order:g}}}: {exc}")
            continue
        return SolutionRecord(
            branch=branch,
            fractional_form=form,
            closed_form=closed,
            arbitrary_constant_symbol=_CONSTANT_SYMBOL[branch],
            equation=bd.equation,
            derivation=bd,
            normalization=norm,
        )
    raise BranchUnavailableError(f"branch {branch} unavailable: " + "; ".join(failures))


def construct_all(bd: BranchDerivation) -> dict[str, SolutionRecord | BranchUnavailableError]:
    out: dict[str, SolutionRecord | BranchUnavailableError] = {}
    for b in BRANCHES:
        try:
            out[b] = construct_solution(bd, b)
        except BranchUnavailableError as exc:
            out[b] = exc
    return out


def evaluate_solution(sr: SolutionRecord, r: float) -> float:
    """Closed form at r > 0 with the arbitrary constant set to 1."""
    if not r > 0:
        raise DomainError(f"solutions are evaluated at r > 0, got r={r!r}")
    return sr.closed_form.evaluate(float(r))


def solution_to_document(sr: SolutionRecord) -> dict:
    doc = {
        "equation": sr.equation.to_dict(),
        "branch": sr.branch,
        "arbitrary_constant": sr.arbitrary_constant_symbol,
        "fractional_form": sr.fractional_form.to_dict(),
        "closed_form": sr.closed_form.to_dict(),
        "normalization": sr.normalization,
    }
    if sr.derivation is not None:
        doc["derivation"] = sr.derivation.to_dict()
    return doc


def solution_from_document(doc: dict) -> SolutionRecord:
    """Rebuild a record from its JSON document (derivation is not re-run)."""
    branch = _check_branch(doc["branch"])
    return SolutionRecord(
        branch=branch,
        fractional_form=FractionalForm.from_dict(doc["fractional_form"]),
        closed_form=function_from_dict(doc["closed_form"]),
        arbitrary_constant_symbol=doc.get("arbitrary_constant", _CONSTANT_SYMBOL[branch]),
        equation=EquationParams.from_dict(doc["equation"]),
        normalization=doc.get("normalization"),
    )


def structured_sum(*fs: Structured) -> Structured:
    parts: list[StructuredFunction] = []
    for f in fs:
        parts.extend(f.parts if isinstance(f, FunctionSum) else (f,))
    return FunctionSum(tuple(parts)).simplified()
