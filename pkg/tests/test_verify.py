import dataclasses
import json
import math
from types import SimpleNamespace

import pytest

from nabla_dfc import dfc
from nabla_dfc.errors import DomainError
from nabla_dfc.rl import ExpPowerTerm, StructuredFunction
from nabla_dfc.schrodinger import EquationParams, construct_solution, derive_branches
from nabla_dfc.verify import (
    DEFAULT_GRID,
    IDENTITY_TOLERANCES,
    identity_suite,
    ode_residual,
    representation_equivalence,
)
from nabla_dfc.worked_examples import EXAMPLES, run_example

EX2 = EquationParams(alpha_sq=1, beta=0, gamma=2, delta=2, rho=-1)
EX3 = EquationParams(alpha_sq=1, beta=2, gamma=4, delta=2, rho=-2)


def exp_power(*terms):
    return StructuredFunction.of(*(ExpPowerTerm(*t) for t in terms))


class TestResidual:
    def test_decaying_solution(self):
        assert ode_residual(EX2, exp_power((1, -1, -1))).relative_max <= 1e-10

    def test_inverse_square_solution(self):
        # e^r (r - 2) / r^2
        f = exp_power((1, 1, -1), (-2, 1, -2))
        assert ode_residual(EX3, f).relative_max <= 1e-10

    def test_sensitivity(self):
        f = exp_power((1, -1, -1), (0.01, 0, 1))
        assert ode_residual(EX2, f).relative_max > 1e-3

    def test_deterministic(self):
        sr = construct_solution(derive_branches(EX3), "I")
        assert ode_residual(EX3, sr) == ode_residual(EX3, sr)

    def test_report_fields(self):
        rep = ode_residual(EX2, exp_power((1, -1, -1)))
        assert rep.grid == DEFAULT_GRID
        assert len(rep.residuals) == len(DEFAULT_GRID)
        assert rep.relative_max == max(abs(x) for x in rep.residuals) / rep.scale

    @pytest.mark.parametrize("grid", [(0.0, 1.0), (-1.0, 2.0), (2.0, 1.0), (1.0, 1.0)])
    def test_bad_grid(self, grid):
        with pytest.raises(DomainError):
            ode_residual(EX2, exp_power((1, -1, -1)), grid)


class TestEquivalence:
    def test_fractional_record(self):
        sr = construct_solution(derive_branches(EXAMPLES[1].equation, 5), "III")
        res = representation_equivalence(sr, (0.25, 0.5, 1.0), 1e-6)
        assert res.agree and res.max_deviation <= 1e-6

    def test_identity_order_is_exact(self):
        sr = construct_solution(derive_branches(EX2), "I")
        res = representation_equivalence(sr, DEFAULT_GRID)
        # same function, merged into one exp-power term on the closed side
        assert res.agree and res.max_deviation <= 4e-15

    @pytest.mark.parametrize("branch", ["I", "III"])
    def test_scaled_closed_form_disagrees(self, branch):
        sr = construct_solution(derive_branches(EXAMPLES[1].equation, 5), branch)
        bad = dataclasses.replace(sr, closed_form=sr.closed_form.scaled(1.01))
        res = representation_equivalence(bad, (0.25, 0.5, 1.0), 1e-6)
        assert not res.agree and res.max_deviation == pytest.approx(0.01 / 1.01, rel=1e-4)

    @pytest.mark.parametrize("number", [2, 3])
    def test_both_representations_of_examples(self, number):
        bd = EXAMPLES[number].derivation()
        for branch in ("I", "II", "III", "IV"):
            sr = construct_solution(bd, branch)
            grid = (0.25, 0.5, 1.0) if sr.fractional_form.order < 0 else DEFAULT_GRID
            assert representation_equivalence(sr, grid).agree


class TestIdentitySuite:
    def test_acceptance_run(self):
        report = identity_suite(seed=42, trials=200)
        assert report.passed
        assert [c.name for c in report.checks] == list(IDENTITY_TOLERANCES)
        assert all(c.trials == 200 for c in report.checks)

    def test_deterministic(self):
        a = identity_suite(seed=7, trials=20).to_dict()
        b = identity_suite(seed=7, trials=20).to_dict()
        assert a == b

    def test_single_trial(self):
        report = identity_suite(seed=1, trials=1)
        assert report.passed

    def test_linearity_on_constants(self):
        U = dfc.GridFunction.constant(0.75, 0, 6)
        Y = dfc.GridFunction.constant(-2.0, 0, 6)
        combo = dfc.GridFunction(0, tuple(3 * u - 0.5 * y for u, y in zip(U.values, Y.values)))
        for nu in (0.3, 1.0, 1.7):
            lhs = dfc.fractional_difference(combo, nu, 6)
            rhs = 3 * dfc.fractional_difference(U, nu, 6) - 0.5 * dfc.fractional_difference(Y, nu, 6)
            assert lhs == pytest.approx(rhs, abs=1e-15)

    def test_broken_leibniz_is_caught(self):
        def broken(U, Y, nu, t):
            return dfc.leibniz_difference(U, Y, nu, t) * (1 + 1e-6)

        kernel = SimpleNamespace(**{n: getattr(dfc, n) for n in dir(dfc) if not n.startswith("__")})
        kernel.leibniz_difference = broken
        report = identity_suite(seed=42, trials=50, kernel=kernel)
        assert not report.check("leibniz").passed
        assert all(c.passed for c in report.checks if c.name != "leibniz")

    def test_broken_kernel_weight_is_caught(self):
        kernel = SimpleNamespace(**{n: getattr(dfc, n) for n in dir(dfc) if not n.startswith("__")})
        kernel.power_rule = lambda nu, up, a, t: dfc.power_rule(nu, up, a, t) + 1e-6
        assert not identity_suite(seed=3, trials=20, kernel=kernel).check("power_rule").passed

    def test_serialization(self):
        doc = json.loads(json.dumps(identity_suite(seed=42, trials=2).to_dict()))
        assert doc["seed"] == 42 and doc["trials"] == 2
        assert set(doc["checks"][0]) == {"name", "max_error", "tolerance", "pass"}

    def test_trials_must_be_positive(self):
        with pytest.raises(ValueError):
            identity_suite(trials=0)


class TestWorkedExamples:
    @pytest.mark.parametrize("number", [1, 2, 3])
    def test_all_checks_pass(self, number):
        report = run_example(number)
        assert report.passed, [c.to_dict() for c in report.checks if not c.passed]

    def test_printed_equation_discrepancy_reported(self):
        report = run_example(1)
        check = next(c for c in report.checks if c.name == "printed_equation.discrepancy")
        assert check.max_error > 1e-3 and check.passed
        assert any("printed equation" in n for n in report.notes)

    def test_tightened_tolerance_fails(self):
        assert not run_example(1, residual_tol=0.0).passed
