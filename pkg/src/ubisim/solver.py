"""Closed-form budget-neutral tax rate solving, with a bisection oracle.

Budget neutrality: aggregate disposable income after the reform equals the
baseline aggregate. Because the taxable base does not depend on the rate,
revenue is exactly linear in the solved rate, so the closed form is exact;
bisection over a re-simulated revenue function exists as an independent
check of the same fixed point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .baseline import BaselineResult
from .errors import EmptyUpperBracket, InfeasibleNeutrality, NotBracketed, ZeroBase
from .reform import PretaxDecomposition, TwoBracketTax

# Residual tolerance: R$1/year absolute or 1e-10 relative, whichever is
# larger. Integer-centavo inputs make an exactly-zero residual unattainable.
ABS_TOL_CENTS_PER_YEAR = Fraction(100)
REL_TOL = Fraction(1, 10**10)

MAX_BISECTION_ITERATIONS = 200

CLOSED_FORM = "closed_form"
BISECTION = "bisection"
GIVEN = "given"


def neutrality_tolerance(reference: Fraction) -> Fraction:
    return max(ABS_TOL_CENTS_PER_YEAR, abs(reference) * REL_TOL)


@dataclass(frozen=True)
class NeutralityProblem:
    """Annual aggregates (exact centavos/year) defining the revenue target."""

    baseline_disposable_total: Fraction
    nonubi_income_total: Fraction
    ubi_gross_cost: Fraction
    taxable_base_total: Fraction
    base_below: Fraction | None = None   # two-bracket only
    base_above: Fraction | None = None
    lower_rate: float | None = None

    def __post_init__(self):
        if min(self.nonubi_income_total, self.ubi_gross_cost, self.taxable_base_total) < 0:
            raise ValueError("aggregate totals must be non-negative")
        if self.base_below is not None and self.base_above is not None:
            if self.base_below + self.base_above != self.taxable_base_total:
                raise ValueError("two-bracket bases must sum to the taxable base")

    @property
    def is_two_bracket(self) -> bool:
        return self.base_below is not None


def build_problem(baseline: BaselineResult, pretax: PretaxDecomposition) -> NeutralityProblem:
    tax = pretax.spec.tax
    return NeutralityProblem(
        baseline_disposable_total=baseline.aggregates.disposable,
        nonubi_income_total=pretax.nonubi_income,
        ubi_gross_cost=pretax.ubi_gross_cost,
        taxable_base_total=pretax.taxable_base,
        base_below=pretax.base_below,
        base_above=pretax.base_above,
        lower_rate=tax.lower_rate if isinstance(tax, TwoBracketTax) else None,
    )


def required_revenue(problem: NeutralityProblem) -> Fraction:
    """Revenue the new tax must raise for the reform to be budget neutral.

    Negative values mean the reform is self-financing at rate zero (a
    surplus, reported rather than raised as an error).
    """
    return (
        problem.nonubi_income_total
        + problem.ubi_gross_cost
        - problem.baseline_disposable_total
    )


@dataclass(frozen=True)
class SolvedRates:
    """A solved rate with its diagnostics; residual is revenue minus target."""

    flat_or_upper_rate: float
    required_revenue: Fraction
    method: str
    residual: Fraction
    iterations: int = 0
    surplus: Fraction = Fraction(0)
    lower_rate: float | None = None


def solve_flat_rate(problem: NeutralityProblem) -> SolvedRates:
    """Closed-form flat rate: required revenue divided by the taxable base."""
    req = required_revenue(problem)
    if req <= 0:
        return SolvedRates(
            flat_or_upper_rate=0.0,
            required_revenue=req,
            method=CLOSED_FORM,
            residual=Fraction(0),
            surplus=-req,
        )
    if problem.taxable_base_total == 0:
        raise ZeroBase("no taxable base but revenue is required")
    rate = req / problem.taxable_base_total
    if rate >= 1:
        raise InfeasibleNeutrality(
            "budget neutrality would need a tax rate of "
            f"{float(rate):.1%}; required revenue exceeds the taxable base",
            shortfall_cents_per_year=float(req - problem.taxable_base_total),
        )
    rate_f = float(rate)
    residual = Fraction(rate_f) * problem.taxable_base_total - req
    _check_residual(residual, problem)
    return SolvedRates(
        flat_or_upper_rate=rate_f,
        required_revenue=req,
        method=CLOSED_FORM,
        residual=residual,
    )


def solve_upper_rate(problem: NeutralityProblem) -> SolvedRates:
    """Closed-form upper rate of a two-bracket tax, given the lower rate."""
    if not problem.is_two_bracket or problem.lower_rate is None:
        raise ValueError("not a two-bracket problem")
    req = required_revenue(problem)
    lower_revenue = Fraction(problem.lower_rate) * problem.base_below
    req_above = req - lower_revenue
    if req_above <= 0:
        residual = lower_revenue - req  # surplus collected by the lower bracket
        return SolvedRates(
            flat_or_upper_rate=0.0,
            required_revenue=req,
            method=CLOSED_FORM,
            residual=Fraction(0),
            surplus=residual,
            lower_rate=problem.lower_rate,
        )
    if problem.base_above == 0:
        raise EmptyUpperBracket(
            "upper bracket is empty but the lower bracket cannot meet the requirement"
        )
    rate = req_above / problem.base_above
    if rate >= 1:
        raise InfeasibleNeutrality(
            "budget neutrality would need an upper rate of "
            f"{float(rate):.1%}; required revenue exceeds the taxable base",
            shortfall_cents_per_year=float(req_above - problem.base_above),
        )
    rate_f = float(rate)
    residual = lower_revenue + Fraction(rate_f) * problem.base_above - req
    _check_residual(residual, problem)
    return SolvedRates(
        flat_or_upper_rate=rate_f,
        required_revenue=req,
        method=CLOSED_FORM,
        residual=residual,
        lower_rate=problem.lower_rate,
    )


def _check_residual(residual: Fraction, problem: NeutralityProblem) -> None:
    tol = neutrality_tolerance(problem.baseline_disposable_total)
    if abs(residual) > tol:
        raise ArithmeticError(
            f"solver residual {float(residual):.6g} centavos/year exceeds tolerance "
            f"{float(tol):.6g}"
        )


def bisection_check(
    revenue_fn: Callable[[float], float],
    target: float,
    tolerance: float | None = None,
    max_iterations: int = MAX_BISECTION_ITERATIONS,
) -> tuple[float, int]:
    """Bisection root of revenue_fn(rate) = target over rates in [0, 1).

    revenue_fn must be continuous and non-decreasing. Returns (rate,
    iterations); the rate satisfies |revenue(rate) - target| <= tolerance.
    Exists as an independent oracle for the closed-form solvers.
    """
    target = float(target)
    if tolerance is None:
        tolerance = max(float(ABS_TOL_CENTS_PER_YEAR), abs(target) * float(REL_TOL))
    lo, hi = 0.0, 1.0 - 1e-12
    f_lo, f_hi = revenue_fn(lo), revenue_fn(hi)
    if target < f_lo - tolerance or target > f_hi + tolerance:
        raise NotBracketed(
            f"target {target:.6g} not bracketed by revenue range [{f_lo:.6g}, {f_hi:.6g}]"
        )
    mid = lo
    for iteration in range(1, max_iterations + 1):
        mid = (lo + hi) / 2.0
        value = revenue_fn(mid)
        if abs(value - target) <= tolerance:
            return mid, iteration
        if value < target:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-18:
            return mid, iteration
    return mid, max_iterations
