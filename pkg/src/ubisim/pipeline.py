"""End-to-end scenario pipeline shared by the CLI and the HTTP service.

One code path: baseline -> resolve scheme parameters from data -> solve the
budget-neutral rate -> apply the scheme -> distributional statistics ->
report. Both front ends call run_simulation so their outputs are identical
for identical inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

from .baseline import FROM_COLUMNS, BaselinePolicy, BaselineResult, baseline_disposable
from .microdata import Population, weighted_median
from .presets import load_baseline_policy
from .reform import (
    FlatTax,
    ReformOutcome,
    SchemeSpec,
    TwoBracketTax,
    apply_scheme,
    compute_pretax,
)
from .report import Report, build_report
from .solver import (
    GIVEN,
    SolvedRates,
    build_problem,
    required_revenue,
    solve_flat_rate,
    solve_upper_rate,
)
from .stats import DecileAssignment, IndividualIncomeView, assign_deciles, build_income_view


@dataclass(frozen=True)
class SimulationRun:
    population: Population
    policy: BaselinePolicy
    scheme: SchemeSpec  # fully resolved: concrete rates and threshold
    baseline: BaselineResult
    outcome: ReformOutcome
    rates: SolvedRates
    view: IndividualIncomeView
    assignment: DecileAssignment
    report: Report


def default_policy_for(population: Population) -> BaselinePolicy:
    """Columns when the data carries them (the more faithful source), else
    the shipped schedule config."""
    policy = load_baseline_policy()
    if population.has_baseline_columns:
        return replace(policy, tax_source=FROM_COLUMNS, name=policy.name + "+columns")
    return policy


def derive_two_bracket_threshold(population: Population) -> int:
    """Twice the weighted median per-capita household gross income.

    Gross income includes baseline transfers (market + pensions + other
    benefits); the median is taken over individuals at person weights.
    """
    gross = population.market + population.pension + population.other
    pc_gross = population.per_capita_by_household(gross)
    median = weighted_median(zip(pc_gross.tolist(), population.weight.tolist()))
    return 2 * int(median)


def resolve_scheme(
    population: Population, scheme: SchemeSpec, poverty_line: int | None = None
) -> SchemeSpec:
    """Fill data-derived parameters (two-bracket threshold, line override)."""
    if poverty_line is not None:
        scheme = replace(scheme, poverty_line=poverty_line)
    if isinstance(scheme.tax, TwoBracketTax) and scheme.tax.threshold is None:
        scheme = scheme.with_threshold(derive_two_bracket_threshold(population))
    return scheme


def solve_scheme_rate(
    population: Population, baseline: BaselineResult, scheme: SchemeSpec
) -> tuple[SchemeSpec, SolvedRates]:
    """Solve any to-solve rate; pass through concrete rates with diagnostics."""
    pretax = compute_pretax(population, scheme)
    problem = build_problem(baseline, pretax)
    if isinstance(scheme.tax, FlatTax):
        if scheme.tax.rate is None:
            rates = solve_flat_rate(problem)
            return scheme.with_rate(rates.flat_or_upper_rate), rates
        return scheme, _given_rates(problem, scheme)
    if scheme.tax.upper_rate is None:
        rates = solve_upper_rate(problem)
        return scheme.with_rate(rates.flat_or_upper_rate), rates
    return scheme, _given_rates(problem, scheme)


def _given_rates(problem, scheme: SchemeSpec) -> SolvedRates:
    req = required_revenue(problem)
    tax = scheme.tax
    if isinstance(tax, FlatTax):
        revenue = Fraction(tax.rate) * problem.taxable_base_total
        rate, lower = tax.rate, None
    else:
        revenue = (
            Fraction(tax.lower_rate) * problem.base_below
            + Fraction(tax.upper_rate) * problem.base_above
        )
        rate, lower = tax.upper_rate, tax.lower_rate
    return SolvedRates(
        flat_or_upper_rate=rate,
        required_revenue=req,
        method=GIVEN,
        residual=revenue - req,
        lower_rate=lower,
    )


def run_simulation(
    population: Population,
    scheme: SchemeSpec,
    policy: BaselinePolicy | None = None,
    poverty_line: int | None = None,
    baseline: BaselineResult | None = None,
) -> SimulationRun:
    """Simulate one scheme over one population and assemble the full report.

    A precomputed `baseline` (matching the policy) skips the baseline pass;
    the what-if service uses this to keep per-request latency interactive.
    """
    if policy is None:
        policy = default_policy_for(population)
    if baseline is None:
        baseline = baseline_disposable(population, policy)
    elif baseline.population is not population:
        raise ValueError("baseline was computed for a different population")
    scheme = resolve_scheme(population, scheme, poverty_line)
    scheme, rates = solve_scheme_rate(population, baseline, scheme)
    outcome = apply_scheme(population, baseline, scheme)
    view = build_income_view(population, baseline, outcome)
    assignment = assign_deciles(view)
    report = build_report(baseline, outcome, rates, view, assignment, scheme)
    return SimulationRun(
        population=population,
        policy=policy,
        scheme=scheme,
        baseline=baseline,
        outcome=outcome,
        rates=rates,
        view=view,
        assignment=assignment,
        report=report,
    )


def reform_revenue_fn(population: Population, baseline: BaselineResult, scheme: SchemeSpec):
    """rate -> annual reform tax revenue by full re-application of the scheme.

    Used as the independent re-simulation oracle against the closed-form
    solvers; the candidate rate is the flat rate (or the upper rate when the
    scheme is two-bracket).
    """

    def revenue(rate: float) -> float:
        outcome = apply_scheme(population, baseline, scheme.with_rate(rate))
        return float(outcome.aggregates.tax_revenue)

    return revenue
