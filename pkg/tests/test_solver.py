from fractions import Fraction

import pytest

from ubisim.errors import (
    EmptyUpperBracket,
    InfeasibleNeutrality,
    NotBracketed,
    ZeroBase,
)
from ubisim.pipeline import reform_revenue_fn, run_simulation
from ubisim.solver import (
    NeutralityProblem,
    bisection_check,
    neutrality_tolerance,
    required_revenue,
    solve_flat_rate,
    solve_upper_rate,
)

BILLION_BRL = Fraction(10**9 * 100)  # annual centavos per billion of reais


def problem_from_billions(
    baseline_disposable, nonubi, gross, base=None, below=None, above=None, lower=None
):
    base = nonubi if base is None else base
    return NeutralityProblem(
        baseline_disposable_total=baseline_disposable * BILLION_BRL,
        nonubi_income_total=nonubi * BILLION_BRL,
        ubi_gross_cost=gross * BILLION_BRL,
        taxable_base_total=base * BILLION_BRL,
        base_below=below * BILLION_BRL if below is not None else None,
        base_above=above * BILLION_BRL if above is not None else None,
        lower_rate=lower,
    )


# Nationwide 2017 reference aggregates, billions of BRL per year: initial
# market income 2,571; current disposable 3,018; per-scheme UBI gross cost
# and post-offset remaining transfers.
REFERENCE_2017 = {
    "uniform_ubi": dict(baseline_disposable=3018, nonubi=2571 + 553, gross=1009),
    "age_banded_ubi": dict(baseline_disposable=3018, nonubi=2571 + 469, gross=969),
}


class TestRequiredRevenue:
    def test_uniform_ubi_reference(self):
        problem = problem_from_billions(**REFERENCE_2017["uniform_ubi"])
        assert required_revenue(problem) == 1115 * BILLION_BRL

    def test_age_banded_reference(self):
        problem = problem_from_billions(**REFERENCE_2017["age_banded_ubi"])
        assert required_revenue(problem) == 991 * BILLION_BRL

    def test_null_reform(self):
        problem = problem_from_billions(baseline_disposable=3018, nonubi=3018, gross=0)
        assert required_revenue(problem) == 0


class TestSolveFlatRate:
    def test_uniform_ubi_rate(self):
        problem = problem_from_billions(**REFERENCE_2017["uniform_ubi"])
        rates = solve_flat_rate(problem)
        assert rates.flat_or_upper_rate == pytest.approx(0.357, abs=1e-3)
        assert abs(rates.residual) <= neutrality_tolerance(problem.baseline_disposable_total)

    def test_age_banded_rate(self):
        problem = problem_from_billions(**REFERENCE_2017["age_banded_ubi"])
        rates = solve_flat_rate(problem)
        assert rates.flat_or_upper_rate == pytest.approx(0.326, abs=1e-3)

    def test_zero_requirement(self):
        problem = problem_from_billions(baseline_disposable=3018, nonubi=3018, gross=0)
        rates = solve_flat_rate(problem)
        assert rates.flat_or_upper_rate == 0.0

    def test_self_financing_reports_surplus(self):
        # offsets remove more transfers than the UBI adds: surplus at rate 0
        problem = problem_from_billions(baseline_disposable=3018, nonubi=2900, gross=0)
        rates = solve_flat_rate(problem)
        assert rates.flat_or_upper_rate == 0.0
        assert rates.surplus == 118 * BILLION_BRL

    def test_infeasible(self):
        problem = problem_from_billions(baseline_disposable=3018, nonubi=3000, gross=4000)
        with pytest.raises(InfeasibleNeutrality) as err:
            solve_flat_rate(problem)
        assert err.value.shortfall_cents_per_year > 0

    def test_zero_base(self):
        problem = problem_from_billions(baseline_disposable=100, nonubi=0, gross=200, base=0)
        with pytest.raises(ZeroBase):
            solve_flat_rate(problem)

    def test_monotone_in_gross_cost(self):
        rates = [
            solve_flat_rate(
                problem_from_billions(baseline_disposable=3018, nonubi=3124, gross=g)
            ).flat_or_upper_rate
            for g in (900, 1009, 1100, 1300)
        ]
        assert rates == sorted(rates)


class TestSolveUpperRate:
    def test_hand_arithmetic(self):
        problem = problem_from_billions(
            baseline_disposable=300, nonubi=320, gross=80,
            below=200, above=120, lower=0.20,
        )
        # required 100; lower leg 40; upper = 60/120 = 0.50
        rates = solve_upper_rate(problem)
        assert rates.flat_or_upper_rate == pytest.approx(0.5, abs=1e-12)

    def test_lower_bracket_suffices(self):
        # required (50) is met exactly by 0.25 x base_below (0.25 is float-exact)
        problem = problem_from_billions(
            baseline_disposable=300, nonubi=350, gross=0,
            base=300, below=200, above=100, lower=0.25,
        )
        rates = solve_upper_rate(problem)
        assert rates.flat_or_upper_rate == 0.0
        assert rates.surplus == 0

    def test_degenerates_to_flat_with_zero_threshold(self):
        flat = solve_flat_rate(problem_from_billions(**REFERENCE_2017["uniform_ubi"]))
        two = solve_upper_rate(
            problem_from_billions(
                **REFERENCE_2017["uniform_ubi"],
                below=0,
                above=REFERENCE_2017["uniform_ubi"]["nonubi"],
                lower=flat.flat_or_upper_rate,
            )
        )
        assert two.flat_or_upper_rate == pytest.approx(flat.flat_or_upper_rate, rel=1e-15)

    def test_empty_upper_bracket(self):
        problem = problem_from_billions(
            baseline_disposable=300, nonubi=320, gross=80,
            below=320, above=0, lower=0.20,
        )
        with pytest.raises(EmptyUpperBracket):
            solve_upper_rate(problem)


class TestBisectionCheck:
    def test_linear_revenue(self):
        base = float(3124 * BILLION_BRL)
        target = float(1115 * BILLION_BRL)
        rate, iterations = bisection_check(lambda r: r * base, target)
        assert rate == pytest.approx(1115 / 3124, abs=1e-6)
        assert iterations <= 200

    def test_zero_target(self):
        rate, _ = bisection_check(lambda r: r * 1e14, 0.0)
        assert rate == pytest.approx(0.0, abs=1e-9)

    def test_not_bracketed(self):
        with pytest.raises(NotBracketed):
            bisection_check(lambda r: r * 100.0, 1e9)

    def test_full_resimulation_matches_closed_form(self, medium_population, scheme1):
        run = run_simulation(medium_population, scheme1)
        revenue = reform_revenue_fn(medium_population, run.baseline, run.scheme)
        rate, _ = bisection_check(revenue, float(run.rates.required_revenue))
        closed = run.rates.flat_or_upper_rate
        assert abs(rate - closed) / closed <= 1e-9

    def test_revenue_strictly_increasing_in_rate(self, medium_population, scheme2):
        run = run_simulation(medium_population, scheme2)
        revenue = reform_revenue_fn(medium_population, run.baseline, run.scheme)
        samples = [revenue(r) for r in (0.0, 0.1, 0.25, 0.5, 0.9)]
        assert all(a < b for a, b in zip(samples, samples[1:]))


class TestNeutralityInvariant:
    @pytest.mark.parametrize("name", ["scheme1", "scheme2", "scheme3"])
    def test_aggregate_disposable_preserved(self, medium_population, name):
        from ubisim.presets import load_scheme

        run = run_simulation(medium_population, load_scheme(name))
        residual = run.outcome.aggregates.disposable - run.baseline.aggregates.disposable
        assert abs(residual) <= neutrality_tolerance(run.baseline.aggregates.disposable)
