"""Budget, poverty/inequality, decile tables and figure series.

Tables keep full-precision internals (exact rationals for money identities,
floats for statistics); a single half-up rounding step is applied when cells
are printed. Table files carry the printed cells; manifest.json carries the
full-precision values. Serialization is byte-stable for fixed inputs.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import __version__
from .baseline import BaselineResult
from .errors import InconsistentInputs, IoFailure
from .money import CENTS, Money, format_brl
from .reform import ReformOutcome, SchemeSpec, TwoBracketTax
from .solver import SolvedRates
from .stats import (
    GROUP_ALL,
    GROUP_CHILDREN,
    GROUP_ELDERLY,
    GROUP_WORKING_AGE,
    DecileAssignment,
    IndividualIncomeView,
    WinnersLosersRow,
    poverty_headcount,
    weighted_gini,
    winners_losers,
)

EMPTY_CELL = ""
EMPTY_GROUP = "n/a"  # demographic group absent from the data


def fmt_fixed(x: float, decimals: int) -> str:
    """Half-up fixed-point rendering; the single display rounding step."""
    q = 10**decimals
    scaled = math.floor(abs(x) * q + 0.5)
    sign = "-" if x < 0 and scaled > 0 else ""
    whole, frac = divmod(scaled, q)
    if decimals == 0:
        return f"{sign}{whole}"
    return f"{sign}{whole}.{frac:0{decimals}d}"


def fmt_percent(x: float | None) -> str:
    return EMPTY_CELL if x is None else fmt_fixed(x, 1)


def fmt_billions(annual_cents: Fraction | None) -> str:
    if annual_cents is None:
        return EMPTY_CELL
    return fmt_fixed(float(annual_cents) / CENTS / 1e9, 1)


def fmt_monthly_reais(cents: float | None) -> str:
    return EMPTY_CELL if cents is None else fmt_fixed(cents / CENTS, 0)


def fmt_gini(x: float | None) -> str:
    return EMPTY_CELL if x is None else fmt_fixed(x, 3)


@dataclass(frozen=True)
class BudgetTable:
    """Annual aggregates for the current system and one reform scheme."""

    scheme_name: str
    initial_income: Fraction
    current_pensions: Fraction
    current_other_transfers: Fraction
    current_pit: Fraction
    current_ssc: Fraction
    current_disposable: Fraction
    ubi_gross_cost: Fraction
    transfer_reduction: Fraction
    ubi_net_cost: Fraction
    remaining_transfers: Fraction
    reform_tax_revenue: Fraction
    reform_disposable: Fraction
    flat_or_standard_rate: float
    reduced_rate: float | None

    @property
    def current_transfers(self) -> Fraction:
        return self.current_pensions + self.current_other_transfers

    @property
    def current_tax_revenue(self) -> Fraction:
        return self.current_pit + self.current_ssc


@dataclass(frozen=True)
class PovertyInequalityTable:
    """Headcount by age group and Gini, before and after the reform.

    Headcounts are fractions in [0, 1] or None for an empty group; the
    reduction columns are percentages of the baseline value.
    """

    scheme_name: str
    poverty_line: Money
    headcount_baseline: dict[str, float | None]
    headcount_reform: dict[str, float | None]
    gini_baseline: float
    gini_reform: float

    def headcount_reduction_pct(self, group: str) -> float | None:
        base = self.headcount_baseline[group]
        reform = self.headcount_reform[group]
        if base is None or reform is None or base == 0:
            return None
        return 100.0 * (base - reform) / base

    @property
    def gini_reduction_pct(self) -> float:
        return 100.0 * (self.gini_baseline - self.gini_reform) / self.gini_baseline


@dataclass(frozen=True)
class FigureSeriesRow:
    """Chart data: winner/loser shares and mean gain/loss relative to each
    group's own mean baseline income. Derived from decile table cells."""

    decile: int | str
    winners_pct: float
    losers_pct: float
    gain_pct_of_baseline: float | None
    loss_pct_of_baseline: float | None


@dataclass(frozen=True)
class Report:
    scheme_name: str
    budget: BudgetTable
    poverty: PovertyInequalityTable
    deciles: list[WinnersLosersRow]
    figure_series: list[FigureSeriesRow]
    manifest: dict


def _figure_series(deciles: list[WinnersLosersRow]) -> list[FigureSeriesRow]:
    rows = []
    for r in deciles:
        gain_pct = None
        if r.winners_mean_gain is not None and r.winners_mean_baseline:
            gain_pct = 100.0 * r.winners_mean_gain / r.winners_mean_baseline
        loss_pct = None
        if r.losers_mean_loss is not None and r.losers_mean_baseline:
            loss_pct = 100.0 * r.losers_mean_loss / r.losers_mean_baseline
        rows.append(
            FigureSeriesRow(
                decile=r.decile,
                winners_pct=r.winners_pct,
                losers_pct=r.losers_pct,
                gain_pct_of_baseline=gain_pct,
                loss_pct_of_baseline=loss_pct,
            )
        )
    return rows


def build_report(
    baseline: BaselineResult,
    outcome: ReformOutcome,
    rates: SolvedRates,
    view: IndividualIncomeView,
    assignment: DecileAssignment,
    scheme: SchemeSpec,
) -> Report:
    """Assemble every table from one scheme run over one population."""
    population = baseline.population
    if outcome.population is not population:
        raise InconsistentInputs("baseline and reform results use different populations")
    if len(view) != len(population):
        raise InconsistentInputs("income view does not match the population")

    b, r = baseline.aggregates, outcome.aggregates
    tax = outcome.spec.tax
    budget = BudgetTable(
        scheme_name=scheme.name,
        initial_income=b.market,
        current_pensions=b.pensions,
        current_other_transfers=b.other_transfers,
        current_pit=b.pit,
        current_ssc=b.ssc,
        current_disposable=b.disposable,
        ubi_gross_cost=r.ubi_gross_cost,
        transfer_reduction=r.transfer_reduction,
        ubi_net_cost=r.ubi_net_cost,
        remaining_transfers=r.remaining_transfers,
        reform_tax_revenue=r.tax_revenue,
        reform_disposable=r.disposable,
        flat_or_standard_rate=rates.flat_or_upper_rate,
        reduced_rate=tax.lower_rate if isinstance(tax, TwoBracketTax) else None,
    )

    groups = (GROUP_ALL, GROUP_CHILDREN, GROUP_WORKING_AGE, GROUP_ELDERLY)
    line = scheme.poverty_line
    poverty = PovertyInequalityTable(
        scheme_name=scheme.name,
        poverty_line=line,
        headcount_baseline={
            g: poverty_headcount(view, line, "baseline", g) for g in groups
        },
        headcount_reform={g: poverty_headcount(view, line, "reform", g) for g in groups},
        gini_baseline=weighted_gini(view.pc_baseline, view.weight),
        gini_reform=weighted_gini(view.pc_reform, view.weight),
    )

    deciles = winners_losers(view, assignment)
    manifest = {
        "software": f"ubisim {__version__}",
        "scheme": scheme_manifest(scheme),
        "population_fingerprint": population.fingerprint(),
        "population": {
            "provenance": population.provenance,
            "persons": population.summary.persons,
            "households": population.summary.households,
            "total_weight": population.summary.total_weight,
        },
        "poverty_line_brl": format_brl(line),
        "solver": {
            "method": rates.method,
            "rate": rates.flat_or_upper_rate,
            "lower_rate": rates.lower_rate,
            "required_revenue_cents_per_year": float(rates.required_revenue),
            "residual_cents_per_year": float(rates.residual),
            "surplus_cents_per_year": float(rates.surplus),
            "iterations": rates.iterations,
        },
        "budget_cents_per_year": {
            "initial_income": float(budget.initial_income),
            "current_pensions": float(budget.current_pensions),
            "current_other_transfers": float(budget.current_other_transfers),
            "current_pit": float(budget.current_pit),
            "current_ssc": float(budget.current_ssc),
            "current_disposable": float(budget.current_disposable),
            "ubi_gross_cost": float(budget.ubi_gross_cost),
            "transfer_reduction": float(budget.transfer_reduction),
            "ubi_net_cost": float(budget.ubi_net_cost),
            "remaining_transfers": float(budget.remaining_transfers),
            "reform_tax_revenue": float(budget.reform_tax_revenue),
            "reform_disposable": float(budget.reform_disposable),
        },
        "indicators": {
            "gini_baseline": poverty.gini_baseline,
            "gini_reform": poverty.gini_reform,
            "headcount_baseline": poverty.headcount_baseline,
            "headcount_reform": poverty.headcount_reform,
        },
    }
    return Report(
        scheme_name=scheme.name,
        budget=budget,
        poverty=poverty,
        deciles=deciles,
        figure_series=_figure_series(deciles),
        manifest=manifest,
    )


def scheme_manifest(scheme: SchemeSpec) -> dict:
    """Scheme serialization used in manifests and the what-if API."""
    tax = scheme.tax
    if isinstance(tax, TwoBracketTax):
        tax_doc = {
            "type": "two_bracket",
            "lower_rate": tax.lower_rate,
            "threshold": format_brl(tax.threshold) if tax.threshold is not None else None,
            "upper_rate": tax.upper_rate if tax.upper_rate is not None else "solve",
        }
    else:
        tax_doc = {"type": "flat", "rate": tax.rate if tax.rate is not None else "solve"}
    return {
        "name": scheme.name,
        "ubi": {
            "child": format_brl(scheme.ubi.child_amount),
            "adult": format_brl(scheme.ubi.adult_amount),
            "elderly": format_brl(scheme.ubi.elderly_amount),
            "child_max_age": scheme.ubi.child_max_age,
            "elderly_min_age": scheme.ubi.elderly_min_age,
        },
        "offsets": {
            "pensions_reduced_by_ubi": scheme.offset.pensions_reduced_by_ubi,
            "other_benefits_abolished": scheme.offset.other_benefits_abolished,
        },
        "tax": tax_doc,
        "ubi_taxable": scheme.ubi_taxable,
        "poverty_line": format_brl(scheme.poverty_line),
    }


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def budget_rows(budget: BudgetTable) -> list[tuple[str, str, str]]:
    name = budget.scheme_name
    rows = [
        ("item", "current", name),
        ("initial_income", fmt_billions(budget.initial_income), fmt_billions(budget.initial_income)),
        ("current_transfers", fmt_billions(budget.current_transfers), EMPTY_CELL),
        ("pensions", fmt_billions(budget.current_pensions), EMPTY_CELL),
        ("others", fmt_billions(budget.current_other_transfers), EMPTY_CELL),
        ("current_tax_revenue", fmt_billions(budget.current_tax_revenue), EMPTY_CELL),
        ("personal_income_tax", fmt_billions(budget.current_pit), EMPTY_CELL),
        ("employee_social_contribution", fmt_billions(budget.current_ssc), EMPTY_CELL),
        ("current_disposable_income", fmt_billions(budget.current_disposable), EMPTY_CELL),
        ("ubi_gross_cost", EMPTY_CELL, fmt_billions(budget.ubi_gross_cost)),
        ("reduction_in_current_transfers", EMPTY_CELL, fmt_billions(budget.transfer_reduction)),
        ("ubi_net_cost", EMPTY_CELL, fmt_billions(budget.ubi_net_cost)),
        ("remaining_transfers", EMPTY_CELL, fmt_billions(budget.remaining_transfers)),
        ("tax_revenue_under_ubi", EMPTY_CELL, fmt_billions(budget.reform_tax_revenue)),
        ("disposable_income_under_ubi", EMPTY_CELL, fmt_billions(budget.reform_disposable)),
        ("flat_or_standard_rate_pct", EMPTY_CELL, fmt_percent(100.0 * budget.flat_or_standard_rate)),
        (
            "reduced_rate_pct",
            EMPTY_CELL,
            fmt_percent(100.0 * budget.reduced_rate) if budget.reduced_rate is not None else EMPTY_CELL,
        ),
    ]
    return rows


def poverty_rows(tbl: PovertyInequalityTable) -> list[tuple[str, str, str, str]]:
    def cell(x: float | None) -> str:
        return EMPTY_GROUP if x is None else fmt_percent(100.0 * x)

    rows = [("indicator", "current", tbl.scheme_name, "pct_reduction")]
    labels = (
        ("poverty_total", GROUP_ALL),
        ("poverty_children", GROUP_CHILDREN),
        ("poverty_working_age", GROUP_WORKING_AGE),
        ("poverty_elderly", GROUP_ELDERLY),
    )
    for label, group in labels:
        rows.append(
            (
                label,
                cell(tbl.headcount_baseline[group]),
                cell(tbl.headcount_reform[group]),
                fmt_percent(tbl.headcount_reduction_pct(group))
                if tbl.headcount_reduction_pct(group) is not None
                else EMPTY_GROUP,
            )
        )
    rows.append(
        ("gini", fmt_gini(tbl.gini_baseline), fmt_gini(tbl.gini_reform), fmt_percent(tbl.gini_reduction_pct))
    )
    return rows


def decile_rows(deciles: list[WinnersLosersRow]) -> list[tuple[str, ...]]:
    rows = [
        (
            "decile",
            "winners_pct",
            "winners_baseline_brl_month",
            "winners_gain_brl_month",
            "losers_pct",
            "losers_baseline_brl_month",
            "losers_loss_brl_month",
        )
    ]
    for r in deciles:
        rows.append(
            (
                str(r.decile),
                fmt_percent(r.winners_pct),
                fmt_monthly_reais(r.winners_mean_baseline),
                fmt_monthly_reais(r.winners_mean_gain),
                fmt_percent(r.losers_pct),
                fmt_monthly_reais(r.losers_mean_baseline),
                fmt_monthly_reais(r.losers_mean_loss),
            )
        )
    return rows


def figure_rows(series: list[FigureSeriesRow]) -> list[tuple[str, ...]]:
    rows = [("decile", "winners_pct", "losers_pct", "gain_pct_of_baseline", "loss_pct_of_baseline")]
    for r in series:
        rows.append(
            (
                str(r.decile),
                fmt_percent(r.winners_pct),
                fmt_percent(r.losers_pct),
                fmt_percent(r.gain_pct_of_baseline),
                fmt_percent(r.loss_pct_of_baseline),
            )
        )
    return rows


def serialize_report(report: Report, fmt: str, destination) -> list[Path]:
    """Write one file per table plus manifest.json into `destination`.

    fmt is "csv" or "json"; both carry the printed cells, the manifest keeps
    full precision. Output is byte-stable for fixed inputs.
    """
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown report format {fmt!r}")
    dest = Path(destination)
    try:
        dest.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IoFailure(f"cannot create output directory {dest}: {exc}") from exc

    slug = report.scheme_name
    tables = {
        "budget_table": budget_rows(report.budget),
        "poverty_inequality": poverty_rows(report.poverty),
        f"deciles_{slug}": decile_rows(report.deciles),
        f"figure_series_{slug}": figure_rows(report.figure_series),
    }
    written: list[Path] = []
    try:
        for name, rows in tables.items():
            path = dest / f"{name}.{fmt}"
            if fmt == "csv":
                with open(path, "w", newline="", encoding="utf-8") as fh:
                    csv.writer(fh, lineterminator="\n").writerows(rows)
            else:
                doc = {
                    "table": name,
                    "columns": list(rows[0]),
                    "rows": [list(r) for r in rows[1:]],
                }
                path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
            written.append(path)
        manifest_path = dest / "manifest.json"
        manifest_path.write_text(
            json.dumps(report.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        written.append(manifest_path)
    except OSError as exc:
        raise IoFailure(f"cannot write report files under {dest}: {exc}") from exc
    return written


def parse_table_csv(path) -> list[tuple[str, ...]]:
    """Read back a serialized CSV table (round-trip helper)."""
    with open(path, newline="", encoding="utf-8") as fh:
        return [tuple(row) for row in csv.reader(fh)]
