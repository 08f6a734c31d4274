"""Scalar special functions: gamma, log-gamma, generalized binomials and Kummer's 1F1.

Everything here operates on Python floats. The gamma function uses a
Lanczos approximation (g = 7, 9 coefficients) with reflection for arguments
below one half; the log-gamma function switches to Taylor series around 1
and 2 so that it keeps full relative accuracy next to its zeros.
"""

from __future__ import annotations

import math

from .errors import ConvergenceError, DomainError, PoleError

__all__ = [
    "gamma",
    "log_gamma",
    "log_abs_gamma",
    "binomial_general",
    "kummer_1f1",
]

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_EULER_GAMMA = 0.57721566490153286061

# Largest argument with a finite double-precision gamma value.
_GAMMA_MAX_ARG = 171.6243769563027

KUMMER_RTOL = 1e-16
KUMMER_MAX_TERMS = 10_000


def _is_nonpositive_integer(x: float) -> bool:
    return x <= 0 and x == math.floor(x)


def _lanczos_sum(x: float) -> float:
    # expects the already-shifted argument (x - 1)
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (x + i)
    return acc


def _sin_pi(x: float) -> float:
    """sin(pi*x) with exact argument reduction."""
    r = math.fmod(x, 2.0)
    if r > 1.0:
        r -= 2.0
    elif r < -1.0:
        r += 2.0
    if r > 0.5:
        r = 1.0 - r
    elif r < -0.5:
        r = -1.0 - r
    return math.sin(math.pi * r)


def _gamma_positive(x: float) -> float:
    if x == math.floor(x) and x <= 171:
        return float(math.factorial(int(x) - 1))
    x -= 1.0
    t = x + _LANCZOS_G + 0.5
    # split the power so t**(x+0.5) does not overflow before exp(-t) scales it
    half = math.pow(t, 0.5 * (x + 0.5))
    return _SQRT_2PI * _lanczos_sum(x) * half * (half * math.exp(-t))


def gamma(x: float) -> float:
    """Gamma function of a real argument.

    Raises PoleError at 0, -1, -2, ... and OverflowError once the result
    exceeds the double-precision range.
    """
    x = float(x)
    if math.isnan(x):
        return math.nan
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at x={x!r}")
    if x > _GAMMA_MAX_ARG:
        raise OverflowError(f"gamma({x!r}) exceeds the double range")
    if x >= 0.5:
        return _gamma_positive(x)
    s = _sin_pi(x)
    if 1.0 - x <= 171.0:
        return math.pi / (s * _gamma_positive(1.0 - x))
    # deep negative arguments: go through logs, result is tiny anyway
    lg = math.log(math.pi) - math.log(abs(s)) - log_gamma(1.0 - x)
    return math.copysign(math.exp(lg), s)


def _zeta_table(kmax: int) -> list[float]:
    pi = math.pi
    known = {
        2: pi**2 / 6.0,
        3: 1.2020569031595942854,
        4: pi**4 / 90.0,
        5: 1.0369277551433699263,
        6: pi**6 / 945.0,
        7: 1.0083492773819228268,
        8: pi**8 / 9450.0,
        9: 1.0020083928260822144,
    }
    out = [0.0, 0.0]
    for k in range(2, kmax + 1):
        if k in known:
            out.append(known[k])
        else:
            out.append(math.fsum(n ** (-k) for n in range(1, 80)))
    return out


_ZETA = _zeta_table(40)


def _log_gamma_near_one(eps: float) -> float:
    """ln Gamma(1 + eps) for |eps| <= 0.25 by its Taylor series."""
    acc = -_EULER_GAMMA * eps
    power = -eps
    for k in range(2, len(_ZETA)):
        power *= -eps
        term = _ZETA[k] * power / k
        acc += term
        if abs(term) < 1e-18 * max(abs(acc), 1e-300):
            break
    return acc


def log_gamma(x: float) -> float:
    """Natural logarithm of Gamma(x) for x > 0."""
    x = float(x)
    if not x > 0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    if x == math.floor(x) and x <= 171:
        return math.log(math.factorial(int(x) - 1))
    if abs(x - 1.0) <= 0.25:
        return _log_gamma_near_one(x - 1.0)
    if abs(x - 2.0) <= 0.25:
        return _log_gamma_near_one(x - 2.0) + math.log1p(x - 2.0)
    if x < 15.0:
        return math.log(gamma(x))
    x -= 1.0
    t = x + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (x + 0.5) * math.log(t) - t + math.log(_lanczos_sum(x))


def log_abs_gamma(x: float) -> tuple[float, float]:
    """Return (ln|Gamma(x)|, sign of Gamma(x)) for any non-pole real x."""
    x = float(x)
    if _is_nonpositive_integer(x):
        raise PoleError(f"gamma has a pole at x={x!r}")
    if x > 0:
        return log_gamma(x), 1.0
    s = _sin_pi(x)
    lg = math.log(math.pi) - math.log(abs(s)) - log_gamma(1.0 - x)
    # Gamma(x) for x < 0 is positive exactly when floor(x) is even
    sign = 1.0 if math.floor(x) % 2 == 0 else -1.0
    return lg, sign


def binomial_general(nu: float, n: int) -> float:
    """Generalized binomial coefficient Gamma(nu+1) / (Gamma(nu+1-n) n!).

    Evaluated as the falling product nu (nu-1) ... (nu-n+1) / n!, which
    yields exactly 0 whenever nu is a nonnegative integer smaller than n
    (the denominator pole).
    """
    nu = float(nu)
    if n < 0 or int(n) != n:
        raise DomainError(f"binomial_general needs a nonnegative integer n, got {n!r}")
    if nu < 0 and nu == math.floor(nu):
        raise PoleError(f"binomial_general undefined for negative integer nu={nu!r}")
    acc = 1.0
    for k in range(int(n)):
        acc *= (nu - k) / (k + 1)
        if acc == 0.0:
            break
    return acc


def _kummer_series(a: float, b: float, z: float) -> float:
    total = 1.0
    term = 1.0
    terminating = _is_nonpositive_integer(a)
    for k in range(KUMMER_MAX_TERMS):
        term *= (a + k) / (b + k) * z / (k + 1)
        total += term
        if term == 0.0:
            return total
        if abs(term) < KUMMER_RTOL * abs(total):
            # only stop once the following terms keep shrinking
            next_ratio = abs((a + k + 1) * z / ((b + k + 1) * (k + 2)))
            if next_ratio < 1.0:
                return total
    if terminating:
        return total
    raise ConvergenceError(
        f"1F1({a}; {b}; {z}) did not converge in {KUMMER_MAX_TERMS} terms"
    )


def kummer_1f1(a: float, b: float, z: float) -> float:
    """Kummer's confluent hypergeometric function M(a; b; z).

    Summed as the forward power series. For negative z with a non-terminating
    series, Kummer's transformation M(a;b;z) = e^z M(b-a;b;-z) is applied
    first so the summed terms share a sign whenever b > a.
    """
    a, b, z = float(a), float(b), float(z)
    if _is_nonpositive_integer(b):
        raise DomainError(f"1F1 second parameter must not be a non-positive integer, got b={b!r}")
    if z == 0.0 or a == 0.0:
        return 1.0
    if z < 0 and not _is_nonpositive_integer(a):
        return math.exp(z) * _kummer_series(b - a, b, -z)
    return _kummer_series(a, b, z)
