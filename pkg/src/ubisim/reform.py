"""Universal basic income reform: age-banded UBI, benefit offsets, new taxes.

A scheme replaces the baseline taxes entirely: every person receives a UBI
by age band, pensions are reduced by the recipient's own UBI amount (floored
at zero), other cash benefits are abolished, and a flat or two-bracket tax
applies to all non-UBI cash income from the first real.

Per-person money is integer centavos with taxes rounded half-up once; the
aggregate layer is exact rational arithmetic so budget identities reconcile
exactly before display rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .baseline import BaselineResult
from .errors import InvalidSpec, UnsolvedRate
from .microdata import Population
from .money import Money, annualize, round_half_up, round_half_up_array


@dataclass(frozen=True)
class UbiSchedule:
    """Monthly UBI amounts by age band; bands partition all ages."""

    child_amount: Money    # age <= child_max_age
    adult_amount: Money    # child_max_age < age < elderly_min_age
    elderly_amount: Money  # age >= elderly_min_age
    child_max_age: int = 17
    elderly_min_age: int = 65

    def __post_init__(self):
        if min(self.child_amount, self.adult_amount, self.elderly_amount) < 0:
            raise InvalidSpec("UBI amounts must be non-negative")
        if not 0 <= self.child_max_age < self.elderly_min_age:
            raise InvalidSpec("age bands must satisfy 0 <= child_max_age < elderly_min_age")


def ubi_amount(age: int, ubi: UbiSchedule) -> Money:
    """Band lookup for one person's monthly UBI."""
    if age < 0:
        raise ValueError("age must be non-negative")
    if age <= ubi.child_max_age:
        return ubi.child_amount
    if age >= ubi.elderly_min_age:
        return ubi.elderly_amount
    return ubi.adult_amount


def ubi_amount_array(ages: np.ndarray, ubi: UbiSchedule) -> np.ndarray:
    out = np.full(len(ages), ubi.adult_amount, dtype=np.int64)
    out[ages <= ubi.child_max_age] = ubi.child_amount
    out[ages >= ubi.elderly_min_age] = ubi.elderly_amount
    return out


@dataclass(frozen=True)
class OffsetRule:
    pensions_reduced_by_ubi: bool = True
    other_benefits_abolished: bool = True


def offset_pension(pension: Money, ubi: Money, rule: OffsetRule) -> Money:
    """Pension after the UBI offset, floored at zero."""
    if pension < 0 or ubi < 0:
        raise ValueError("pension and ubi must be non-negative")
    if not rule.pensions_reduced_by_ubi:
        return pension
    return max(pension - ubi, 0)


@dataclass(frozen=True)
class FlatTax:
    """Single marginal rate on all taxable income; rate None means 'solve'."""

    rate: float | None = None

    def __post_init__(self):
        if self.rate is not None and not 0.0 <= self.rate < 1.0:
            raise InvalidSpec("flat rate must lie in [0, 1)")

    @property
    def solved(self) -> bool:
        return self.rate is not None


@dataclass(frozen=True)
class TwoBracketTax:
    """Reduced rate below a monthly threshold, higher rate above.

    upper_rate None means 'solve'; threshold None means 'derive from data'
    (twice the weighted median per-capita household gross income). A solved
    design with upper_rate < lower_rate is reported, not rejected.
    """

    lower_rate: float
    threshold: Money | None = None
    upper_rate: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.lower_rate < 1.0:
            raise InvalidSpec("lower rate must lie in [0, 1)")
        if self.upper_rate is not None and not 0.0 <= self.upper_rate < 1.0:
            raise InvalidSpec("upper rate must lie in [0, 1)")
        if self.threshold is not None and self.threshold <= 0:
            raise InvalidSpec("threshold must be positive when given")

    @property
    def solved(self) -> bool:
        return self.upper_rate is not None and self.threshold is not None


TaxDesign = FlatTax | TwoBracketTax


def two_bracket_tax(taxable: Money, design: TwoBracketTax) -> Money:
    """lower*min(taxable, threshold) + upper*max(taxable - threshold, 0)."""
    if taxable < 0:
        raise ValueError("taxable must be non-negative")
    if not design.solved:
        raise UnsolvedRate("two-bracket design still has unsolved parameters")
    below = min(taxable, design.threshold)
    above = max(taxable - design.threshold, 0)
    return round_half_up(design.lower_rate * below + design.upper_rate * above)


@dataclass(frozen=True)
class SchemeSpec:
    """A complete UBI reform: payment schedule, offsets, and tax design."""

    name: str
    ubi: UbiSchedule
    tax: TaxDesign
    offset: OffsetRule = OffsetRule()
    ubi_taxable: bool = False
    poverty_line: Money = 40_600  # R$406/month per capita

    def __post_init__(self):
        if self.poverty_line <= 0:
            raise InvalidSpec("poverty line must be positive")

    @property
    def solved(self) -> bool:
        return self.tax.solved

    def with_rate(self, rate: float) -> "SchemeSpec":
        """The same scheme with its to-solve rate fixed."""
        if isinstance(self.tax, FlatTax):
            return replace(self, tax=FlatTax(rate=rate))
        return replace(self, tax=replace(self.tax, upper_rate=rate))

    def with_threshold(self, threshold: Money) -> "SchemeSpec":
        if not isinstance(self.tax, TwoBracketTax):
            return self
        return replace(self, tax=replace(self.tax, threshold=threshold))


@dataclass(frozen=True)
class PretaxDecomposition:
    """Rate-independent pieces of a reform: UBI, offsets, taxable base.

    Totals are exact annual rationals (centavos/year); arrays are monthly
    integer centavos per person.
    """

    population: Population
    spec: SchemeSpec
    ubi: np.ndarray
    remaining_pension: np.ndarray
    remaining_other: np.ndarray
    taxable: np.ndarray
    ubi_gross_cost: Fraction
    transfer_reduction: Fraction
    remaining_transfers: Fraction
    nonubi_income: Fraction
    taxable_base: Fraction
    base_below: Fraction | None = None
    base_above: Fraction | None = None


def compute_pretax(population: Population, spec: SchemeSpec) -> PretaxDecomposition:
    """Apply UBI assignment and offsets; split the taxable base if two-bracket.

    Requires a concrete threshold for two-bracket designs (derive it from the
    data first); tax rates may still be unsolved.
    """
    ubi = ubi_amount_array(population.age, spec.ubi)
    if spec.offset.pensions_reduced_by_ubi:
        remaining_pension = np.maximum(population.pension - ubi, 0)
    else:
        remaining_pension = population.pension.copy()
    if spec.offset.other_benefits_abolished:
        remaining_other = np.zeros_like(population.other)
    else:
        remaining_other = population.other.copy()

    taxable = population.market + remaining_pension + remaining_other
    if spec.ubi_taxable:
        taxable = taxable + ubi

    reduction = (population.pension - remaining_pension) + (population.other - remaining_other)

    agg = population.weighted_aggregate
    base_below = base_above = None
    if isinstance(spec.tax, TwoBracketTax):
        if spec.tax.threshold is None:
            raise UnsolvedRate(
                "two-bracket threshold not yet derived; resolve it from the data first"
            )
        thr = spec.tax.threshold
        base_below = annualize(agg(np.minimum(taxable, thr)))
        base_above = annualize(agg(np.maximum(taxable - thr, 0)))

    return PretaxDecomposition(
        population=population,
        spec=spec,
        ubi=ubi,
        remaining_pension=remaining_pension,
        remaining_other=remaining_other,
        taxable=taxable,
        ubi_gross_cost=annualize(agg(ubi)),
        transfer_reduction=annualize(agg(reduction)),
        remaining_transfers=annualize(agg(remaining_pension + remaining_other)),
        nonubi_income=annualize(agg(population.market + remaining_pension + remaining_other)),
        taxable_base=annualize(agg(taxable)),
        base_below=base_below,
        base_above=base_above,
    )


@dataclass(frozen=True)
class ReformAggregates:
    """Exact annual totals for the reform column of the budget table.

    tax_revenue and disposable carry the (float) solved rate exactly, so
    `disposable = nonubi_income + ubi_gross_cost - tax_revenue` holds as an
    identity of rationals.
    """

    ubi_gross_cost: Fraction
    transfer_reduction: Fraction
    ubi_net_cost: Fraction
    remaining_transfers: Fraction
    nonubi_income: Fraction
    taxable_base: Fraction
    tax_revenue: Fraction
    disposable: Fraction


@dataclass(frozen=True)
class ReformOutcome:
    population: Population
    spec: SchemeSpec
    ubi: np.ndarray
    remaining_pension: np.ndarray
    remaining_other: np.ndarray
    taxable: np.ndarray
    tax: np.ndarray         # rounded half-up per person
    disposable: np.ndarray  # identity-exact against the rounded tax
    aggregates: ReformAggregates


def _tax_revenue_exact(pretax: PretaxDecomposition, tax: TaxDesign) -> Fraction:
    if isinstance(tax, FlatTax):
        return Fraction(tax.rate) * pretax.taxable_base
    return (
        Fraction(tax.lower_rate) * pretax.base_below
        + Fraction(tax.upper_rate) * pretax.base_above
    )


def apply_scheme(
    population: Population, baseline: BaselineResult, spec: SchemeSpec
) -> ReformOutcome:
    """Full per-person reform outcome under concrete tax rates.

    Baseline income tax and social contributions are abolished; the new tax
    applies to the taxable base. The per-person accounting identity
    disposable = market + remaining_pension + remaining_other + ubi - tax
    holds exactly in centavos.
    """
    if baseline.population is not population:
        raise InvalidSpec("baseline result belongs to a different population")
    if not spec.solved:
        raise UnsolvedRate(f"scheme {spec.name!r} still has rates marked to-solve")

    pretax = compute_pretax(population, spec)
    taxable_f = pretax.taxable.astype(np.float64)
    if isinstance(spec.tax, FlatTax):
        tax = round_half_up_array(spec.tax.rate * taxable_f)
    else:
        thr = float(spec.tax.threshold)
        tax = round_half_up_array(
            spec.tax.lower_rate * np.minimum(taxable_f, thr)
            + spec.tax.upper_rate * np.maximum(taxable_f - thr, 0.0)
        )

    disposable = (
        population.market + pretax.remaining_pension + pretax.remaining_other
        + pretax.ubi - tax
    )

    revenue = _tax_revenue_exact(pretax, spec.tax)
    agg = ReformAggregates(
        ubi_gross_cost=pretax.ubi_gross_cost,
        transfer_reduction=pretax.transfer_reduction,
        ubi_net_cost=pretax.ubi_gross_cost - pretax.transfer_reduction,
        remaining_transfers=pretax.remaining_transfers,
        nonubi_income=pretax.nonubi_income,
        taxable_base=pretax.taxable_base,
        tax_revenue=revenue,
        disposable=pretax.nonubi_income + pretax.ubi_gross_cost - revenue,
    )
    return ReformOutcome(
        population=population,
        spec=spec,
        ubi=pretax.ubi,
        remaining_pension=pretax.remaining_pension,
        remaining_other=pretax.remaining_other,
        taxable=pretax.taxable,
        tax=tax,
        disposable=disposable,
        aggregates=agg,
    )
