import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nabla_dfc.errors import ConvergenceError, DomainError, PoleError
from nabla_dfc.special import binomial_general, gamma, kummer_1f1, log_abs_gamma, log_gamma

mpmath = pytest.importorskip("mpmath")

# 50-digit mpmath values, frozen
GAMMA_2_2 = 1.1018024908797128393
LOG_GAMMA_10_5 = 13.940625219403763633


def rel(x, y):
    return abs(x - y) / abs(y)


class TestGamma:
    def test_one(self):
        assert gamma(1.0) == 1.0

    def test_half_is_sqrt_pi(self):
        assert rel(gamma(0.5), math.sqrt(math.pi)) <= 1e-15

    def test_frozen_oracle(self):
        assert rel(gamma(2.2), GAMMA_2_2) <= 1e-12

    @pytest.mark.parametrize("x", [0.0, -1.0, -2.0, -170.0])
    def test_poles(self, x):
        with pytest.raises(PoleError):
            gamma(x)

    @pytest.mark.parametrize("x", [171.7, 500.0])
    def test_overflow(self, x):
        with pytest.raises(OverflowError):
            gamma(x)

    def test_accuracy_over_range(self):
        mpmath.mp.dps = 30
        worst = 0.0
        for i in range(1, 3400):
            x = -170.0 + i * 0.1 + 0.0137
            worst = max(worst, rel(gamma(x), float(mpmath.gamma(x))))
        assert worst <= 1e-12

    @settings(max_examples=1000, deadline=None)
    @given(st.floats(0.1, 50.0))
    def test_recurrence(self, x):
        assert rel(gamma(x + 1), x * gamma(x)) <= 1e-11


class TestLogGamma:
    @pytest.mark.parametrize("x", [1.0, 2.0])
    def test_zeros(self, x):
        assert log_gamma(x) == 0.0

    def test_frozen_oracle(self):
        assert rel(log_gamma(10.5), LOG_GAMMA_10_5) <= 1e-12
        assert rel(math.exp(log_gamma(10.5)), gamma(10.5)) <= 1e-11

    @pytest.mark.parametrize("x", [0.0, -0.5, -3.0])
    def test_domain(self, x):
        with pytest.raises(DomainError):
            log_gamma(x)

    def test_near_roots_against_mpmath(self):
        # relative accuracy where ln Gamma passes through zero
        mpmath.mp.dps = 30
        for x in (0.8, 0.95, 0.999, 1.001, 1.2, 1.8, 1.999, 2.001, 2.2):
            assert rel(log_gamma(x), float(mpmath.loggamma(x))) <= 1e-12

    @settings(max_examples=300, deadline=None)
    @given(st.floats(0.1, 100.0))
    def test_exp_matches_gamma(self, x):
        assert rel(math.exp(log_gamma(x)), gamma(x)) <= 1e-10

    def test_abs_form_sign(self):
        val, sign = log_abs_gamma(-0.5)
        assert sign == -1.0
        assert rel(math.exp(val), 2 * math.sqrt(math.pi)) <= 1e-13


class TestBinomial:
    def test_examples(self):
        assert binomial_general(1, 1) == 1.0
        assert binomial_general(3, 5) == 0.0
        assert binomial_general(0.5, 2) == -0.125

    def test_negative_integer_nu(self):
        with pytest.raises(PoleError):
            binomial_general(-2, 3)

    @given(st.floats(-20, 20).filter(lambda v: not (v < 0 and v == int(v))))
    def test_zero_choose(self, nu):
        assert binomial_general(nu, 0) == 1.0

    @given(
        st.floats(-10, 10).filter(lambda v: abs(v - round(v)) > 1e-6),
        st.integers(1, 10),
    )
    def test_pascal(self, nu, n):
        lhs = binomial_general(nu, n)
        rhs = binomial_general(nu - 1, n) + binomial_general(nu - 1, n - 1)
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))


class TestKummer:
    @given(st.floats(-5, 5), st.floats(0.5, 5))
    def test_zero_argument(self, a, b):
        assert kummer_1f1(a, b, 0.0) == 1.0

    def test_exponential(self):
        assert rel(kummer_1f1(1, 1, 1), math.e) <= 1e-15

    def test_identity_oracle(self):
        # 1F1(2;1;z) = (1+z) e^z
        assert rel(kummer_1f1(2, 1, 1), 2 * math.e) <= 1e-14

    def test_terminating_polynomial(self):
        # 1F1(-2; 1; z) = 1 - 2z + z^2/2
        for z in (-3.0, 0.5, 4.0):
            assert kummer_1f1(-2, 1, z) == pytest.approx(1 - 2 * z + z * z / 2, rel=1e-14)

    @pytest.mark.parametrize("b", [0.0, -1.0, -4.0])
    def test_parameter_pole(self, b):
        with pytest.raises(DomainError):
            kummer_1f1(1.5, b, 1.0)

    def test_against_mpmath_large_negative(self):
        mpmath.mp.dps = 30
        for a, b, z in [(11 / 5, 4, -10), (11 / 5, 4, -30), (9 / 5, 4, 10), (0.3, 2.7, -25.0)]:
            ref = float(mpmath.hyp1f1(a, b, z))
            assert abs(kummer_1f1(a, b, z) - ref) <= 1e-10 * (1 + abs(ref))

    def test_convergence_cap(self, monkeypatch):
        from nabla_dfc import special

        monkeypatch.setattr(special, "KUMMER_MAX_TERMS", 5)
        with pytest.raises(ConvergenceError):
            special.kummer_1f1(0.5, 1.5, 30.0)

    @settings(max_examples=100, deadline=None)
    @given(st.floats(-3, 3), st.floats(0.5, 5), st.floats(-5, 5))
    def test_derivative_recurrence(self, a, b, z):
        h = 1e-5
        fd = (kummer_1f1(a, b, z + h) - kummer_1f1(a, b, z - h)) / (2 * h)
        exact = a / b * kummer_1f1(a + 1, b + 1, z)
        assert abs(fd - exact) <= 1e-6 * max(1.0, abs(exact))
