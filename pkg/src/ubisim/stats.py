"""Weighted distributional indicators over per-capita household incomes.

Individuals carry their household's per-capita disposable income; all
indicators (headcount, Gini, deciles, winners/losers) weight persons by
their survey expansion factors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .baseline import BaselineResult
from .errors import AllZeroIncomes, EmptyInput, InconsistentInputs
from .microdata import CHILD_MAX_AGE, ELDERLY_MIN_AGE, Population
from .reform import ReformOutcome

log = logging.getLogger(__name__)

# Winner/loser threshold: R$0.01/month per capita absorbs centavo rounding.
EPSILON_CENTS = 1

GROUP_ALL = "all"
GROUP_CHILDREN = "children"
GROUP_WORKING_AGE = "working_age"
GROUP_ELDERLY = "elderly"
GROUPS = (GROUP_ALL, GROUP_CHILDREN, GROUP_WORKING_AGE, GROUP_ELDERLY)

N_DECILES = 10
DECILE_WEIGHT_WARN = 0.005  # each decile within 0.5% of a tenth of total weight


@dataclass(frozen=True)
class IndividualIncomeView:
    """One entry per person: weight, age, per-capita incomes (centavos)."""

    weight: np.ndarray
    age: np.ndarray
    pc_baseline: np.ndarray
    pc_reform: np.ndarray
    household_id: Sequence[str]
    person_id: Sequence[str]

    def __len__(self) -> int:
        return len(self.weight)


def build_income_view(
    population: Population, baseline: BaselineResult, outcome: ReformOutcome
) -> IndividualIncomeView:
    if baseline.population is not population or outcome.population is not population:
        raise InconsistentInputs("baseline and reform results must share one population")
    return IndividualIncomeView(
        weight=population.weight.copy(),
        age=population.age.copy(),
        pc_baseline=population.per_capita_by_household(baseline.disposable),
        pc_reform=population.per_capita_by_household(outcome.disposable),
        household_id=population.household_id,
        person_id=population.person_id,
    )


def _group_mask(ages: np.ndarray, group: str) -> np.ndarray:
    if group == GROUP_ALL:
        return np.ones(len(ages), dtype=bool)
    if group == GROUP_CHILDREN:
        return ages <= CHILD_MAX_AGE
    if group == GROUP_WORKING_AGE:
        return (ages > CHILD_MAX_AGE) & (ages < ELDERLY_MIN_AGE)
    if group == GROUP_ELDERLY:
        return ages >= ELDERLY_MIN_AGE
    raise ValueError(f"unknown group {group!r}")


def poverty_headcount(
    view: IndividualIncomeView, line: int, income: str = "baseline", group: str = GROUP_ALL
) -> float | None:
    """Weighted share of the group strictly below the line; None if the group
    is empty (an explicit marker, deliberately not 0)."""
    if line <= 0:
        raise ValueError("poverty line must be positive")
    incomes = view.pc_baseline if income == "baseline" else view.pc_reform
    mask = _group_mask(view.age, group)
    total = view.weight[mask].sum()
    if total == 0:
        return None
    poor = incomes[mask] < line
    return float(view.weight[mask][poor].sum() / total)


def weighted_gini(values, weights=None) -> float:
    """Weighted Gini coefficient: mean absolute difference over twice the mean.

    Accepts (values, weights) arrays or an iterable of (income, weight)
    pairs. O(n log n) via a single sorted pass.
    """
    if weights is None:
        pairs = list(values)
        if not pairs:
            raise EmptyInput("gini of empty input")
        values = [v for v, _ in pairs]
        weights = [w for _, w in pairs]
    x = np.asarray(values, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    if len(x) == 0:
        raise EmptyInput("gini of empty input")
    if np.any(w <= 0):
        raise ValueError("weights must be strictly positive")

    order = np.argsort(x, kind="stable")
    x, w = x[order], w[order]
    wx = w * x
    total_wx = wx.sum()
    if total_wx == 0:
        raise AllZeroIncomes("gini undefined when every income is zero")
    w_before = np.cumsum(w) - w
    wx_before = np.cumsum(wx) - wx
    numerator = np.sum(w * (x * w_before - wx_before))
    return float(numerator / (w.sum() * total_wx))


@dataclass(frozen=True)
class DecileAssignment:
    """Decile index 1..10 per person, ranked by baseline per-capita income."""

    decile: np.ndarray
    weight_by_decile: np.ndarray


def assign_deciles(view: IndividualIncomeView) -> DecileAssignment:
    """Equal-weight deciles of pc_baseline with deterministic tie-breaking.

    Persons sort by (income, household_id, person_id); a person lands in
    decile d when its cumulative-weight midpoint falls in the d-th tenth of
    total weight. Small samples with boundary ties may distort decile
    weights; that is logged as a warning, not an error.
    """
    n = len(view)
    order = sorted(
        range(n), key=lambda i: (view.pc_baseline[i], view.household_id[i], view.person_id[i])
    )
    order = np.asarray(order, dtype=np.int64)
    w = view.weight[order]
    total = w.sum()
    midpoint = np.cumsum(w) - w / 2.0
    decile_sorted = np.ceil(midpoint * N_DECILES / total).astype(np.int64)
    np.clip(decile_sorted, 1, N_DECILES, out=decile_sorted)

    decile = np.empty(n, dtype=np.int64)
    decile[order] = decile_sorted

    weight_by_decile = np.zeros(N_DECILES)
    for d in range(1, N_DECILES + 1):
        weight_by_decile[d - 1] = view.weight[decile == d].sum()
    deviation = np.abs(weight_by_decile - total / N_DECILES) / (total / N_DECILES)
    if deviation.max() > DECILE_WEIGHT_WARN:
        log.warning(
            "decile weights deviate up to %.2f%% from a tenth of total weight "
            "(ties at boundaries?)",
            100 * deviation.max(),
        )
    return DecileAssignment(decile=decile, weight_by_decile=weight_by_decile)


@dataclass(frozen=True)
class WinnersLosersRow:
    """One decile (or the all-deciles summary): shares and conditional means.

    Monetary cells are full-precision centavos/month per capita; None marks
    an empty side (no winners or no losers in the decile).
    """

    decile: int | str
    winners_pct: float
    winners_mean_baseline: float | None
    winners_mean_gain: float | None
    losers_pct: float
    losers_mean_baseline: float | None
    losers_mean_loss: float | None
    unchanged_pct: float


def _side_stats(
    weight: np.ndarray, baseline: np.ndarray, delta: np.ndarray, mask: np.ndarray
) -> tuple[float | None, float | None]:
    total = weight[mask].sum()
    if total == 0:
        return None, None
    mean_baseline = float(np.dot(weight[mask], baseline[mask]) / total)
    mean_change = float(np.dot(weight[mask], np.abs(delta[mask])) / total)
    return mean_baseline, mean_change


def winners_losers(
    view: IndividualIncomeView, assignment: DecileAssignment
) -> list[WinnersLosersRow]:
    """Winner/loser shares and average gains/losses per decile plus overall.

    Gains and losses are averaged within the winning and losing groups
    respectively, against those groups' own baseline incomes.
    """
    if len(assignment.decile) != len(view):
        raise InconsistentInputs("decile assignment does not match the income view")
    delta = view.pc_reform.astype(np.int64) - view.pc_baseline.astype(np.int64)
    winners = delta > EPSILON_CENTS
    losers = delta < -EPSILON_CENTS
    unchanged = ~winners & ~losers

    rows: list[WinnersLosersRow] = []
    groups: list[tuple[int | str, np.ndarray]] = [
        (d, assignment.decile == d) for d in range(1, N_DECILES + 1)
    ]
    groups.append(("all", np.ones(len(view), dtype=bool)))
    for label, in_group in groups:
        w_group = view.weight[in_group].sum()
        if w_group == 0:
            rows.append(WinnersLosersRow(label, 0.0, None, None, 0.0, None, None, 0.0))
            continue
        win_share = view.weight[in_group & winners].sum() / w_group
        lose_share = view.weight[in_group & losers].sum() / w_group
        unch_share = view.weight[in_group & unchanged].sum() / w_group
        win_base, win_gain = _side_stats(
            view.weight, view.pc_baseline, delta, in_group & winners
        )
        lose_base, lose_loss = _side_stats(
            view.weight, view.pc_baseline, delta, in_group & losers
        )
        rows.append(
            WinnersLosersRow(
                decile=label,
                winners_pct=100.0 * win_share,
                winners_mean_baseline=win_base,
                winners_mean_gain=win_gain,
                losers_pct=100.0 * lose_share,
                losers_mean_baseline=lose_base,
                losers_mean_loss=lose_loss,
                unchanged_pct=100.0 * unch_share,
            )
        )
    return rows
