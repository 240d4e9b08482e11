"""Pre-reform taxes, transfers, and disposable income.

The baseline is a configurable schedule system: progressive marginal-rate
income tax on market + pension income, capped social contribution on labor
income. Baseline taxes can instead be read straight from data columns when
the microdata carries them (the more faithful source when available).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidSpec, MissingBaselineTaxColumns
from .microdata import Population
from .money import Money, annualize, round_half_up, round_half_up_array

FROM_COLUMNS = "from_columns"
FROM_SCHEDULES = "from_schedules"


@dataclass(frozen=True)
class BracketSchedule:
    """Ordered marginal-rate brackets over a monthly base, with an optional
    cap on the assessable amount."""

    brackets: tuple[tuple[Money, float], ...]  # (lower bound in centavos, marginal rate)
    cap: Money | None = None

    def __post_init__(self):
        if not self.brackets:
            raise InvalidSpec("schedule needs at least one bracket")
        bounds = [b for b, _ in self.brackets]
        if bounds[0] != 0:
            raise InvalidSpec("first bracket must start at 0")
        if any(b2 <= b1 for b1, b2 in zip(bounds, bounds[1:])):
            raise InvalidSpec("bracket lower bounds must be strictly increasing")
        if any(not 0.0 <= r < 1.0 for _, r in self.brackets):
            raise InvalidSpec("marginal rates must lie in [0, 1)")
        if self.cap is not None and self.cap <= 0:
            raise InvalidSpec("cap must be positive when present")

    def top_marginal_rate(self) -> float:
        return max(r for _, r in self.brackets)


def schedule_tax(schedule: BracketSchedule, base: Money) -> Money:
    """Marginal-rate tax on min(base, cap), rounded half-up to centavos.

    Piecewise linear, continuous, and non-decreasing in the base.
    """
    if base < 0:
        raise ValueError("tax base must be non-negative")
    assessable = base if schedule.cap is None else min(base, schedule.cap)
    tax = 0.0
    bounds = [b for b, _ in schedule.brackets] + [None]
    for (lower, rate), upper in zip(schedule.brackets, bounds[1:]):
        if assessable <= lower:
            break
        slice_top = assessable if upper is None else min(assessable, upper)
        tax += rate * (slice_top - lower)
    return round_half_up(tax)


def schedule_tax_array(schedule: BracketSchedule, base: np.ndarray) -> np.ndarray:
    """Vectorized schedule_tax over int64 centavo bases."""
    assessable = base.astype(np.float64)
    if schedule.cap is not None:
        assessable = np.minimum(assessable, float(schedule.cap))
    tax = np.zeros_like(assessable)
    bounds = [b for b, _ in schedule.brackets] + [None]
    for (lower, rate), upper in zip(schedule.brackets, bounds[1:]):
        width = assessable - lower if upper is None else np.clip(assessable - lower, 0.0, upper - lower)
        tax += rate * np.maximum(width, 0.0)
    return round_half_up_array(tax)


@dataclass(frozen=True)
class BaselinePolicy:
    pit: BracketSchedule
    ssc: BracketSchedule
    tax_source: str = FROM_SCHEDULES
    name: str = "baseline"

    def __post_init__(self):
        if self.tax_source not in (FROM_COLUMNS, FROM_SCHEDULES):
            raise InvalidSpec(f"unknown tax_source {self.tax_source!r}")


@dataclass(frozen=True)
class BaselineAggregates:
    """Weighted annual totals, exact rationals of centavos per year."""

    market: Fraction
    pensions: Fraction
    other_transfers: Fraction
    pit: Fraction
    ssc: Fraction
    disposable: Fraction

    @property
    def transfers(self) -> Fraction:
        return self.pensions + self.other_transfers

    @property
    def tax_revenue(self) -> Fraction:
        return self.pit + self.ssc


@dataclass(frozen=True)
class BaselineResult:
    population: Population
    policy: BaselinePolicy
    pit: np.ndarray         # int64 centavos/month per person
    ssc: np.ndarray
    disposable: np.ndarray
    aggregates: BaselineAggregates


def baseline_disposable(population: Population, policy: BaselinePolicy) -> BaselineResult:
    """Per-person baseline taxes and disposable income plus exact aggregates.

    The accounting identity disposable = market + pension + other - pit - ssc
    holds exactly per person in centavos.
    """
    if policy.tax_source == FROM_COLUMNS:
        if not population.has_baseline_columns:
            raise MissingBaselineTaxColumns(
                "policy reads baseline taxes from columns, but baseline_pit/baseline_ssc "
                "are not present on every person"
            )
        pit = population.baseline_pit.copy()
        ssc = population.baseline_ssc.copy()
    else:
        # PIT on market + pension income; SSC on labor income only, capped.
        pit = schedule_tax_array(policy.pit, population.market + population.pension)
        ssc = schedule_tax_array(policy.ssc, population.market)

    disposable = population.market + population.pension + population.other - pit - ssc

    agg = BaselineAggregates(
        market=annualize(population.weighted_aggregate(population.market)),
        pensions=annualize(population.weighted_aggregate(population.pension)),
        other_transfers=annualize(population.weighted_aggregate(population.other)),
        pit=annualize(population.weighted_aggregate(pit)),
        ssc=annualize(population.weighted_aggregate(ssc)),
        disposable=annualize(population.weighted_aggregate(disposable)),
    )
    return BaselineResult(
        population=population,
        policy=policy,
        pit=pit,
        ssc=ssc,
        disposable=disposable,
        aggregates=agg,
    )
