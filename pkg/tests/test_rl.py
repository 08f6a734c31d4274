import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from nabla_dfc import rl
from nabla_dfc.errors import ConvergenceError, IntegrabilityError, OrderError
from nabla_dfc.rl import (
    ExpPowerTerm,
    FunctionSum,
    Kummer,
    StructuredFunction,
    differentiate,
    function_from_dict,
    integer_derivative,
    rl_apply,
    rl_exp_power_closed_form,
    rl_integral_quadrature,
)

mpmath = pytest.importorskip("mpmath")

GRID = (0.5, 1.0, 2.0)


def rel(x, y):
    return abs(x - y) / abs(y)


def same_function(f, g, grid=GRID, tol=1e-12):
    return all(abs(f.evaluate(r) - g(r)) <= tol * max(1.0, abs(g(r))) for r in grid)


class TestQuadrature:
    def test_unit_integral(self):
        assert rl_integral_quadrature(ExpPowerTerm(1, 0, 0), 1.0, 2.0) == pytest.approx(2.0, abs=1e-12)

    def test_half_order_of_r(self):
        # Gamma(2)/Gamma(5/2), 50-digit mpmath, frozen
        got = rl_integral_quadrature(ExpPowerTerm(1, 0, 1), 0.5, 1.0)
        assert got == pytest.approx(0.75225277806367504926, abs=1e-8)

    def test_matches_closed_form_case(self):
        f = ExpPowerTerm(1, -10, 6 / 5)
        closed = rl_exp_power_closed_form(-10, 6 / 5, 9 / 5)
        assert rel(rl_integral_quadrature(f, 9 / 5, 0.5), closed.evaluate(0.5)) <= 1e-6

    def test_non_integrable(self):
        with pytest.raises(IntegrabilityError):
            rl_integral_quadrature(ExpPowerTerm(1, 0, -1.0), 0.5, 1.0)

    def test_bad_order(self):
        with pytest.raises(OrderError):
            rl_integral_quadrature(ExpPowerTerm(1, 0, 1), 0.0, 1.0)

    def test_convergence_error(self, monkeypatch):
        monkeypatch.setattr(rl, "QUAD_ATOL", 0.0)
        monkeypatch.setattr(rl, "QUAD_RTOL", 0.0)
        with pytest.raises(ConvergenceError):
            rl_integral_quadrature(ExpPowerTerm(1, 3.0, 0.3), 0.7, 2.0)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(-10, 10), st.floats(-0.9, 3), st.floats(0.1, 3), st.floats(0.1, 3))
    def test_agrees_with_closed_form(self, c, p, mu, r):
        q = rl_integral_quadrature(ExpPowerTerm(1, c, p), mu, r)
        closed = rl_exp_power_closed_form(c, p, mu).evaluate(r)
        assert rel(q, closed) <= 1e-6


class TestClosedForm:
    def test_plain_power(self):
        f = rl_exp_power_closed_form(0, 1, 1)
        assert f.hypergeometric_factor is None
        assert same_function(f, lambda r: r * r / 2)

    @pytest.mark.parametrize(
        "c, p, mu, a, b, norm",
        [
            (-10, 6 / 5, 9 / 5, 11 / 5, 4, 0.183634),
            (10, 4 / 5, 11 / 5, 9 / 5, 4, 0.155231),
        ],
    )
    def test_printed_normal_forms(self, c, p, mu, a, b, norm):
        f = rl_exp_power_closed_form(c, p, mu)
        (term,) = f.terms
        k = f.hypergeometric_factor
        assert (k.a, k.b, k.scale) == pytest.approx((a, b, c), abs=1e-14)
        assert term.p == pytest.approx(3.0, abs=1e-14)
        assert term.kappa == pytest.approx(norm, abs=5e-6)
        mpmath.mp.dps = 30
        assert term.kappa == pytest.approx(float(mpmath.gamma(a) / mpmath.gamma(b)), rel=1e-13)

    def test_errors(self):
        with pytest.raises(IntegrabilityError):
            rl_exp_power_closed_form(1, -1.5, 0.5)
        with pytest.raises(OrderError):
            rl_exp_power_closed_form(1, 0.5, -0.5)

    @given(st.floats(-10, 10), st.floats(-0.9, 3), st.floats(0.1, 3))
    def test_small_r_asymptotics(self, c, p, mu):
        r = 1e-6
        lead = math.gamma(p + 1) / math.gamma(p + mu + 1) * r ** (p + mu)
        assert abs(rl_exp_power_closed_form(c, p, mu).evaluate(r) / lead - 1) <= 1e-4


class TestIntegerDerivative:
    def test_identity(self):
        f = ExpPowerTerm(1, -2, -3)
        assert integer_derivative(f, 0).terms == (f,)

    def test_first_derivative(self):
        got = integer_derivative(ExpPowerTerm(1, 2, -4), 1)
        assert same_function(
            got, lambda r: 2 * math.exp(2 * r) * r**-4 - 4 * math.exp(2 * r) * r**-5
        )

    def test_second_derivative(self):
        got = integer_derivative(ExpPowerTerm(1, 2, -1), 2)
        assert same_function(got, lambda r: math.exp(2 * r) * (4 / r - 4 / r**2 + 2 / r**3))

    def test_terms_are_merged(self):
        got = integer_derivative(ExpPowerTerm(1, 2, -1), 2)
        keys = [(t.c, t.p) for t in got.terms]
        assert len(keys) == len(set(keys)) == 3


def _repeated_integral(c, p, n, r_end):
    # y^{(n)} = e^{cr} r^p with zero initial data is the n-fold integral from 0
    def rhs(r, y):
        return np.append(y[1:], math.exp(c * r) * r**p)

    sol = solve_ivp(rhs, (0.0, r_end), np.zeros(n), rtol=1e-12, atol=1e-14, method="DOP853")
    return sol.y[0, -1]


class TestApply:
    def test_order_zero(self):
        f = ExpPowerTerm(1, -2, -3)
        assert rl_apply(f, 0).terms == (f,)

    def test_printed_integral(self):
        got = rl_apply(ExpPowerTerm(1, -10, 6 / 5), -9 / 5)
        k = got.hypergeometric_factor
        assert (k.a, k.b, k.scale) == pytest.approx((11 / 5, 4, -10))

    @pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
    def test_four_fold_integral(self, r):
        got = rl_apply(ExpPowerTerm(1, 2, 1), -4).evaluate(r)
        oracle = _repeated_integral(2.0, 1.0, 4, r)
        assert rel(got, oracle) <= 1e-7

    def test_positive_fractional_order_matches_series(self):
        # D^{1/2} of e^{-s} s: termwise power rule on the Taylor series
        mpmath.mp.dps = 30
        f = rl_apply(ExpPowerTerm(1, -1, 1), 0.5)
        for r in GRID:
            ref = mpmath.nsum(
                lambda k: (-1) ** k / mpmath.factorial(k)
                * mpmath.gamma(k + 2) / mpmath.gamma(k + 1.5) * mpmath.mpf(r) ** (k + 0.5),
                [0, mpmath.inf],
            )
            assert rel(f.evaluate(r), float(ref)) <= 1e-12

    def test_positive_fractional_needs_integrable_power(self):
        with pytest.raises(IntegrabilityError):
            rl_apply(ExpPowerTerm(1, 1, -2), 0.5)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(0.2, 1.5), st.floats(0.2, 1.5), st.floats(-3, 3), st.floats(0.01, 2))
    def test_index_law(self, mu1, mu2, c, p):
        f = ExpPowerTerm(1, c, p)
        inner = rl_apply(f, -mu1)
        combined = rl_apply(f, -(mu1 + mu2))
        for r in GRID:
            nested = rl_integral_quadrature(inner, mu2, r)
            assert rel(nested, combined.evaluate(r)) <= 1e-6

    # five-point, fourth-order stencils
    STENCILS = {1: (np.array([1, -8, 0, 8, -1]) / 12, 1), 2: (np.array([-1, 16, -30, 16, -1]) / 12, 2)}

    @pytest.mark.parametrize("n, h", [(1, 1e-3), (2, 1e-2)])
    @pytest.mark.parametrize("c, p", [(-1.5, 0.7), (2.0, 1.3)])
    def test_derivative_undoes_integral(self, n, h, c, p):
        f = ExpPowerTerm(1, c, p)
        weights, power = self.STENCILS[n]
        for r in GRID:
            samples = [rl_integral_quadrature(f, n, r + k * h) for k in range(-2, 3)]
            fd = float(np.dot(weights, samples)) / h**power
            assert rel(fd, f.evaluate(r)) <= 1e-6
            assert rel(differentiate(rl_apply(f, -n), n).evaluate(r), f.evaluate(r)) <= 1e-12


class TestStructuredAlgebra:
    def test_single_term_with_factor(self):
        with pytest.raises(ValueError):
            StructuredFunction((ExpPowerTerm(1, 0, 1), ExpPowerTerm(1, 0, 2)), Kummer(1, 2, 1))

    def test_kummer_derivative_exact(self):
        f = StructuredFunction((ExpPowerTerm(0.5, 1.0, 2.0),), Kummer(1.5, 2.5, -3.0))
        df = differentiate(f)
        h = 1e-5
        for r in GRID:
            fd = (f.evaluate(r + h) - f.evaluate(r - h)) / (2 * h)
            assert rel(df.evaluate(r), fd) <= 1e-7

    @pytest.mark.parametrize(
        "f",
        [
            StructuredFunction.of(ExpPowerTerm(2, -1, -1), ExpPowerTerm(-1, 1, 0.5)),
            StructuredFunction((ExpPowerTerm(0.2, 5, 2),), Kummer(11 / 5, 4, -10)),
            rl_apply(ExpPowerTerm(1, -1, 1), 0.5),
        ],
    )
    def test_json_round_trip(self, f):
        back = function_from_dict(json.loads(json.dumps(f.to_dict())))
        assert back == f or isinstance(back, FunctionSum)
        for r in GRID:
            assert back.evaluate(r) == f.evaluate(r)
