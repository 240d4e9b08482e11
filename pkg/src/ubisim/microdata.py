"""Weighted household survey microdata: ingestion, synthesis, income views.

A Population is column-oriented (numpy arrays over persons, grouped by
household) so the engine can vectorize, with record/household views on top
for row-level work. Populations are immutable after construction.
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DuplicatePersonId,
    EmptyInput,
    IngestionError,
    InvalidSpec,
    MissingColumn,
    NegativeIncome,
    NonPositiveWeight,
    UnequalWeightsWithinHousehold,
)
from .money import (
    WEIGHT_SCALE,
    Money,
    format_brl,
    format_weight,
    parse_brl,
    parse_weight,
    weighted_total,
)

REQUIRED_COLUMNS = (
    "household_id",
    "person_id",
    "age",
    "weight",
    "market_income",
    "pension_income",
    "other_benefit_income",
)
OPTIONAL_COLUMNS = ("baseline_pit", "baseline_ssc")

CHILD_MAX_AGE = 17
ELDERLY_MIN_AGE = 65


@dataclass(frozen=True)
class PersonRecord:
    person_id: str
    household_id: str
    age: int
    weight: float
    market_income: Money
    pension_income: Money
    other_benefit_income: Money
    baseline_pit: Money | None = None
    baseline_ssc: Money | None = None


@dataclass(frozen=True)
class Household:
    household_id: str
    members: tuple[PersonRecord, ...]

    def __len__(self) -> int:
        return len(self.members)

    @property
    def weight(self) -> float:
        return self.members[0].weight


@dataclass(frozen=True)
class IngestionSummary:
    persons: int
    households: int
    total_weight: float


class Population:
    """Immutable weighted person table grouped into households."""

    def __init__(self, persons: Sequence[PersonRecord], provenance: str = "ingested"):
        if not persons:
            raise EmptyInput("population has no persons")
        # Group by household in first-appearance order, keeping row order inside.
        by_household: dict[str, list[PersonRecord]] = {}
        for p in persons:
            by_household.setdefault(p.household_id, []).append(p)
        ordered = [p for members in by_household.values() for p in members]

        n = len(ordered)
        self.provenance = provenance
        self.person_id = [p.person_id for p in ordered]
        self.household_id = [p.household_id for p in ordered]
        self.age = np.array([p.age for p in ordered], dtype=np.int32)
        self.weight_scaled = np.array(
            [round(p.weight * WEIGHT_SCALE) for p in ordered], dtype=np.int64
        )
        self.weight = self.weight_scaled / WEIGHT_SCALE
        self.market = np.array([p.market_income for p in ordered], dtype=np.int64)
        self.pension = np.array([p.pension_income for p in ordered], dtype=np.int64)
        self.other = np.array([p.other_benefit_income for p in ordered], dtype=np.int64)
        has_pit = all(p.baseline_pit is not None for p in ordered)
        has_ssc = all(p.baseline_ssc is not None for p in ordered)
        self.baseline_pit = (
            np.array([p.baseline_pit for p in ordered], dtype=np.int64) if has_pit else None
        )
        self.baseline_ssc = (
            np.array([p.baseline_ssc for p in ordered], dtype=np.int64) if has_ssc else None
        )

        sizes = [len(m) for m in by_household.values()]
        self.household_start = np.zeros(len(sizes) + 1, dtype=np.int64)
        np.cumsum(sizes, out=self.household_start[1:])
        self.household_size = np.array(sizes, dtype=np.int64)
        # person -> household ordinal, for per-capita broadcasting
        self.household_index = np.repeat(
            np.arange(len(sizes), dtype=np.int64), sizes
        )

        if self.weight_scaled.min(initial=1) <= 0:
            raise NonPositiveWeight("weights must be strictly positive")
        for arr, name in ((self.market, "market"), (self.pension, "pension"), (self.other, "other")):
            if arr.min(initial=0) < 0:
                raise NegativeIncome(f"negative {name} income in population")

        self.summary = IngestionSummary(
            persons=n,
            households=len(sizes),
            total_weight=float(self.total_weight_exact),
        )
        self._fingerprint: str | None = None
        self._frozen = True

    def __setattr__(self, key, value):
        if getattr(self, "_frozen", False) and key != "_fingerprint":
            raise AttributeError("Population is immutable")
        super().__setattr__(key, value)

    def __len__(self) -> int:
        return len(self.person_id)

    @property
    def n_households(self) -> int:
        return len(self.household_size)

    @property
    def total_weight_exact(self) -> Fraction:
        return Fraction(int(self.weight_scaled.sum(dtype=object)), WEIGHT_SCALE)

    @property
    def has_baseline_columns(self) -> bool:
        return self.baseline_pit is not None and self.baseline_ssc is not None

    def person(self, i: int) -> PersonRecord:
        return PersonRecord(
            person_id=self.person_id[i],
            household_id=self.household_id[i],
            age=int(self.age[i]),
            weight=float(self.weight[i]),
            market_income=int(self.market[i]),
            pension_income=int(self.pension[i]),
            other_benefit_income=int(self.other[i]),
            baseline_pit=int(self.baseline_pit[i]) if self.baseline_pit is not None else None,
            baseline_ssc=int(self.baseline_ssc[i]) if self.baseline_ssc is not None else None,
        )

    def households(self) -> Iterator[Household]:
        for h in range(self.n_households):
            lo, hi = int(self.household_start[h]), int(self.household_start[h + 1])
            yield Household(
                household_id=self.household_id[lo],
                members=tuple(self.person(i) for i in range(lo, hi)),
            )

    def household_weight_scaled(self) -> np.ndarray:
        """One scaled weight per household (members share the expansion factor)."""
        return self.weight_scaled[self.household_start[:-1]]

    def per_capita_by_household(self, values: np.ndarray) -> np.ndarray:
        """Household-mean of per-person centavos, rounded half-up once, broadcast
        back to every member."""
        sums = np.add.reduceat(values.astype(np.int64), self.household_start[:-1])
        pc = (2 * sums + self.household_size) // (2 * self.household_size)
        return pc[self.household_index]

    def weighted_aggregate(self, values: np.ndarray) -> Fraction:
        """Exact person-weighted monthly total in centavos."""
        return weighted_total(self.weight_scaled, values)

    def fingerprint(self) -> str:
        """Content hash of the canonical serialization, for report manifests."""
        if self._fingerprint is None:
            buf = io.StringIO()
            save_population(self, buf)
            self._fingerprint = hashlib.sha256(buf.getvalue().encode()).hexdigest()[:16]
        return self._fingerprint


def load_population(source, delimiter: str = ",") -> Population:
    """Parse delimited microdata into a validated Population.

    `source` is a text stream or a path. Monetary columns are decimal BRL
    with at most two fraction digits, parsed exactly to centavos. Every
    validation error names the offending data row (1-based, header excluded).
    """
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, newline="", encoding="utf-8") as fh:
            return load_population(fh, delimiter=delimiter)

    reader = csv.DictReader(source, delimiter=delimiter)
    header = reader.fieldnames or []
    for col in REQUIRED_COLUMNS:
        if col not in header:
            raise MissingColumn(f"required column {col!r} missing from header")

    persons: list[PersonRecord] = []
    weights_scaled: list[int] = []
    household_weight: dict[str, tuple[int, int]] = {}  # id -> (scaled weight, first row)
    seen_ids: dict[str, int] = {}
    for row_no, row in enumerate(reader, start=1):
        try:
            age = int(row["age"])
        except (TypeError, ValueError):
            raise IngestionError(f"invalid age {row.get('age')!r}", row=row_no) from None
        if age < 0:
            raise IngestionError(f"negative age {age}", row=row_no)

        try:
            w_scaled = parse_weight(row["weight"])
        except (TypeError, ValueError):
            raise NonPositiveWeight(
                f"invalid weight {row.get('weight')!r}", row=row_no
            ) from None
        if w_scaled <= 0:
            raise NonPositiveWeight(f"weight must be > 0, got {row['weight']}", row=row_no)

        incomes = {}
        for col in ("market_income", "pension_income", "other_benefit_income"):
            try:
                cents = parse_brl(row[col])
            except (TypeError, ValueError):
                raise IngestionError(f"invalid {col} {row.get(col)!r}", row=row_no) from None
            if cents < 0:
                raise NegativeIncome(f"{col} is negative ({row[col]})", row=row_no)
            incomes[col] = cents

        optional: dict[str, Money | None] = {}
        for col in OPTIONAL_COLUMNS:
            raw = row.get(col)
            if raw is None or raw.strip() == "":
                optional[col] = None
                continue
            try:
                cents = parse_brl(raw)
            except ValueError:
                raise IngestionError(f"invalid {col} {raw!r}", row=row_no) from None
            if cents < 0:
                raise NegativeIncome(f"{col} is negative ({raw})", row=row_no)
            optional[col] = cents

        pid = row["person_id"].strip()
        hid = row["household_id"].strip()
        if not pid or not hid:
            raise IngestionError("empty person_id or household_id", row=row_no)
        if pid in seen_ids:
            raise DuplicatePersonId(
                f"person_id {pid!r} already seen at row {seen_ids[pid]}", row=row_no
            )
        seen_ids[pid] = row_no

        prior = household_weight.get(hid)
        if prior is not None and prior[0] != w_scaled:
            raise UnequalWeightsWithinHousehold(
                f"household {hid!r} has weight {row['weight']} here but a different "
                f"weight at row {prior[1]}",
                row=row_no,
            )
        household_weight.setdefault(hid, (w_scaled, row_no))

        weights_scaled.append(w_scaled)
        persons.append(
            PersonRecord(
                person_id=pid,
                household_id=hid,
                age=age,
                weight=w_scaled / WEIGHT_SCALE,
                market_income=incomes["market_income"],
                pension_income=incomes["pension_income"],
                other_benefit_income=incomes["other_benefit_income"],
                baseline_pit=optional["baseline_pit"],
                baseline_ssc=optional["baseline_ssc"],
            )
        )

    if not persons:
        raise EmptyInput("no data rows")
    return Population(persons, provenance="ingested")


def save_population(population: Population, dest) -> None:
    """Serialize in the ingestion column contract (round-trips exactly)."""
    if isinstance(dest, (str, bytes)) or hasattr(dest, "__fspath__"):
        with open(dest, "w", newline="", encoding="utf-8") as fh:
            save_population(population, fh)
            return
    with_columns = population.has_baseline_columns
    columns = REQUIRED_COLUMNS + (OPTIONAL_COLUMNS if with_columns else ())
    writer = csv.writer(dest, lineterminator="\n")
    writer.writerow(columns)
    for i in range(len(population)):
        row = [
            population.household_id[i],
            population.person_id[i],
            int(population.age[i]),
            format_weight(int(population.weight_scaled[i])),
            format_brl(int(population.market[i])),
            format_brl(int(population.pension[i])),
            format_brl(int(population.other[i])),
        ]
        if with_columns:
            row.append(format_brl(int(population.baseline_pit[i])))
            row.append(format_brl(int(population.baseline_ssc[i])))
        writer.writerow(row)


def per_capita(household: Household, income_of: Callable[[PersonRecord], Money]) -> Money:
    """Household mean of a per-person income, rounded half-up to the centavo.

    Every member of the household is attributed this value.
    """
    total = sum(income_of(member) for member in household.members)
    n = len(household.members)
    return (2 * total + n) // (2 * n)


def weighted_median(pairs: Iterable[tuple[float, float]]) -> float:
    """Smallest value whose cumulative weight reaches half the total weight."""
    data = list(pairs)
    if not data:
        raise EmptyInput("weighted_median of empty input")
    if any(w <= 0 for _, w in data):
        raise ValueError("weights must be strictly positive")
    values = np.array([v for v, _ in data], dtype=np.float64)
    weights = np.array([w for _, w in data], dtype=np.float64)
    order = np.argsort(values, kind="stable")
    cum = np.cumsum(weights[order])
    idx = int(np.searchsorted(cum, cum[-1] / 2.0, side="left"))
    return float(values[order][idx])


# ---------------------------------------------------------------------------
# Synthetic population generation (desk-scale stand-in for survey microdata)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynthSpec:
    """Parameters for deterministic synthetic microdata.

    Defaults are calibrated so the baseline shows widespread child poverty,
    low old-age poverty (pension-heavy transfers), and a Gini around 0.5.
    """

    n_households: int
    seed: int
    age_mix: tuple[float, float, float] = (0.27, 0.58, 0.15)  # child, adult, elderly
    household_size_probs: tuple[float, ...] = (0.13, 0.25, 0.25, 0.21, 0.11, 0.05)
    median_market_income: Money = 170_000  # centavos/month, employed adults
    income_sigma: float = 1.2
    employment_rate: float = 0.74
    elderly_employment_rate: float = 0.10
    pension_coverage_elderly: float = 0.88
    pension_coverage_older_adults: float = 0.04  # early retirement, ages 55-64
    median_pension: Money = 135_000
    pension_sigma: float = 0.50
    min_pension: Money = 93_700
    benefit_take_up: float = 0.78
    benefit_income_cutoff: Money = 45_000  # per-capita market+pension eligibility line
    median_benefit: Money = 19_000
    benefit_per_child: Money = 5_200
    base_weight: float = 100.0
    weight_jitter: float = 0.25

    def validate(self) -> None:
        if self.n_households < 1:
            raise InvalidSpec("n_households must be >= 1")
        if any(p < 0 for p in self.age_mix) or sum(self.age_mix) <= 0:
            raise InvalidSpec("age_mix shares must be non-negative and sum > 0")
        if any(p < 0 for p in self.household_size_probs) or sum(self.household_size_probs) <= 0:
            raise InvalidSpec("household_size_probs must be non-negative and sum > 0")
        if self.income_sigma < 0 or self.pension_sigma < 0 or self.weight_jitter < 0:
            raise InvalidSpec("distribution shape parameters must be non-negative")
        if self.median_market_income <= 0:
            raise InvalidSpec("median_market_income must be positive")
        if not 0 <= self.employment_rate <= 1:
            raise InvalidSpec("employment_rate must lie in [0, 1]")


CHILD, ADULT, ELDERLY = 0, 1, 2


def _band_quotas(shares: tuple[float, float, float], n: int) -> list[int]:
    """Largest-remainder apportionment; every positive share gets >= 1 when possible."""
    total = sum(shares)
    raw = [s / total * n for s in shares]
    quotas = [int(x) for x in raw]
    remainders = [x - q for x, q in zip(raw, quotas)]
    for _ in range(n - sum(quotas)):
        k = max(range(3), key=lambda i: remainders[i])
        quotas[k] += 1
        remainders[k] = -1.0
    positive = [i for i in range(3) if shares[i] > 0]
    if n >= len(positive):
        for i in positive:
            while quotas[i] == 0:
                donor = max(range(3), key=lambda j: quotas[j])
                quotas[donor] -= 1
                quotas[i] += 1
    return quotas


def synth_generate(spec: SynthSpec) -> Population:
    """Generate a deterministic synthetic Population from a SynthSpec.

    Children are placed in adult-headed households, elderly are clustered in
    elderly-headed ones, pensions go predominantly to the 65+ band, and
    market incomes are lognormal (heavy-tailed) rounded to centavos.
    """
    spec.validate()
    rng = np.random.default_rng(spec.seed)

    size_support = np.arange(1, len(spec.household_size_probs) + 1)
    size_probs = np.asarray(spec.household_size_probs, dtype=np.float64)
    size_probs = size_probs / size_probs.sum()
    sizes = rng.choice(size_support, size=spec.n_households, p=size_probs)
    n_persons = int(sizes.sum())

    n_child, n_adult, n_elderly = _band_quotas(spec.age_mix, n_persons)

    # Heads are non-child while quota allows; elderly heads get their own
    # households so pensioners cluster (matches how the elderly actually live).
    n_heads = spec.n_households
    non_child = n_adult + n_elderly
    if non_child >= n_heads:
        elderly_heads = min(n_elderly, round(n_heads * n_elderly / non_child))
        adult_heads = n_heads - elderly_heads
        if adult_heads > n_adult:
            adult_heads = n_adult
            elderly_heads = n_heads - adult_heads
        child_heads = 0
    else:
        elderly_heads, adult_heads = n_elderly, n_adult
        child_heads = n_heads - non_child

    head_bands = np.array(
        [ELDERLY] * elderly_heads + [ADULT] * adult_heads + [CHILD] * child_heads
    )
    rng.shuffle(head_bands)

    rem_child = n_child - child_heads
    rem_adult = n_adult - adult_heads
    rem_elderly = n_elderly - elderly_heads

    bands_per_household: list[list[int]] = []
    open_slots: list[tuple[int, int]] = []  # (household idx, head band)
    for h in range(spec.n_households):
        bands_per_household.append([int(head_bands[h])])
        for _ in range(int(sizes[h]) - 1):
            open_slots.append((h, int(head_bands[h])))

    # Second elderly member joins an elderly head first (couples), children
    # fill adult-headed slots, adults take what remains; leftovers spill over.
    order = rng.permutation(len(open_slots))
    for k in order:
        h, head_band = open_slots[k]
        if head_band == ELDERLY and rem_elderly > 0 and len(bands_per_household[h]) == 1:
            band = ELDERLY
            rem_elderly -= 1
        elif head_band == ADULT and rem_child > 0 and rng.random() < 0.62:
            band = CHILD
            rem_child -= 1
        elif rem_adult > 0:
            band = ADULT
            rem_adult -= 1
        elif rem_child > 0:
            band = CHILD
            rem_child -= 1
        elif rem_elderly > 0:
            band = ELDERLY
            rem_elderly -= 1
        else:
            band = ADULT
        bands_per_household[h].append(band)

    persons: list[PersonRecord] = []
    pid = 0
    for h in range(spec.n_households):
        hid = f"h{h:06d}"
        w = spec.base_weight * float(np.exp(rng.normal(0.0, spec.weight_jitter)))
        weight = max(round(w, 2), 0.01)

        members: list[dict] = []
        for band in bands_per_household[h]:
            if band == CHILD:
                age = int(rng.integers(0, CHILD_MAX_AGE + 1))
            elif band == ADULT:
                age = int(rng.integers(CHILD_MAX_AGE + 1, ELDERLY_MIN_AGE))
            else:
                age = int(rng.integers(ELDERLY_MIN_AGE, 96))

            market = 0
            if band == ADULT and rng.random() < spec.employment_rate:
                market = round(
                    spec.median_market_income * float(np.exp(rng.normal(0.0, spec.income_sigma)))
                )
            elif band == ELDERLY and rng.random() < spec.elderly_employment_rate:
                market = round(
                    0.8 * spec.median_market_income * float(np.exp(rng.normal(0.0, spec.income_sigma)))
                )

            pension = 0
            takes_pension = (band == ELDERLY and rng.random() < spec.pension_coverage_elderly) or (
                band == ADULT and age >= 55 and rng.random() < spec.pension_coverage_older_adults
            )
            if takes_pension:
                pension = max(
                    spec.min_pension,
                    round(spec.median_pension * float(np.exp(rng.normal(0.0, spec.pension_sigma)))),
                )

            members.append({"age": age, "market": market, "pension": pension, "other": 0})

        # Means-tested cash benefit attributed to the household head.
        n_kids = sum(1 for b in bands_per_household[h] if b == CHILD)
        pc_income = sum(m["market"] + m["pension"] for m in members) / len(members)
        if pc_income < spec.benefit_income_cutoff and rng.random() < spec.benefit_take_up:
            amount = spec.median_benefit * float(np.exp(rng.normal(0.0, 0.35)))
            amount += spec.benefit_per_child * n_kids
            members[0]["other"] = min(round(amount), 70_000)

        for m in members:
            persons.append(
                PersonRecord(
                    person_id=f"p{pid:07d}",
                    household_id=hid,
                    age=m["age"],
                    weight=weight,
                    market_income=int(m["market"]),
                    pension_income=int(m["pension"]),
                    other_benefit_income=int(m["other"]),
                )
            )
            pid += 1

    return Population(persons, provenance=f"synthetic(seed={spec.seed})")
