import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import person
from ubisim.errors import (
    DuplicatePersonId,
    EmptyInput,
    InvalidSpec,
    MissingColumn,
    NegativeIncome,
    NonPositiveWeight,
    UnequalWeightsWithinHousehold,
)
from ubisim.microdata import (
    Household,
    Population,
    SynthSpec,
    load_population,
    per_capita,
    save_population,
    synth_generate,
    weighted_median,
)

HEADER = "household_id,person_id,age,weight,market_income,pension_income,other_benefit_income"


def load_csv(*rows: str) -> Population:
    return load_population(io.StringIO("\n".join([HEADER, *rows]) + "\n"))


class TestLoadPopulation:
    def test_three_rows_one_household(self):
        pop = load_csv(
            "h1,p1,34,120.5,2500.00,0.00,0.00",
            "h1,p2,31,120.5,1200.00,0.00,150.00",
            "h1,p3,6,120.5,0.00,0.00,0.00",
        )
        assert pop.n_households == 1
        assert len(pop) == 3
        assert pop.market.tolist() == [250000, 120000, 0]
        assert pop.summary.persons == 3
        assert pop.summary.total_weight == pytest.approx(361.5)

    def test_negative_income_names_row(self):
        with pytest.raises(NegativeIncome) as err:
            load_csv("h1,p1,34,100,-1,0.00,0.00")
        assert "row 1" in str(err.value)

    def test_unequal_weights_within_household(self):
        with pytest.raises(UnequalWeightsWithinHousehold) as err:
            load_csv(
                "h1,p1,34,100.0,0.00,0.00,0.00",
                "h1,p2,30,90.0,0.00,0.00,0.00",
            )
        assert "row 2" in str(err.value)

    def test_duplicate_person_id(self):
        with pytest.raises(DuplicatePersonId):
            load_csv(
                "h1,p1,34,100,0.00,0.00,0.00",
                "h2,p1,30,100,0.00,0.00,0.00",
            )

    def test_missing_column(self):
        stream = io.StringIO("household_id,person_id,age\nh1,p1,3\n")
        with pytest.raises(MissingColumn):
            load_population(stream)

    def test_non_positive_weight(self):
        with pytest.raises(NonPositiveWeight):
            load_csv("h1,p1,34,0,0.00,0.00,0.00")

    def test_empty_file(self):
        with pytest.raises(EmptyInput):
            load_population(io.StringIO(HEADER + "\n"))

    def test_optional_tax_columns(self):
        stream = io.StringIO(
            HEADER + ",baseline_pit,baseline_ssc\n"
            "h1,p1,34,100,1000.00,0.00,0.00,100.00,80.00\n"
        )
        pop = load_population(stream)
        assert pop.has_baseline_columns
        assert pop.baseline_pit.tolist() == [10000]

    def test_interleaved_households_grouped(self):
        pop = load_csv(
            "h1,p1,34,100,0.00,0.00,0.00",
            "h2,p2,55,80,0.00,0.00,0.00",
            "h1,p3,8,100,0.00,0.00,0.00",
        )
        assert pop.n_households == 2
        assert pop.household_id == ["h1", "h1", "h2"]


class TestRoundTrip:
    def test_serialize_load_equal(self):
        pop = load_csv(
            "h1,p1,34,120.53,2500.00,0.00,0.00",
            "h1,p2,6,120.53,0.00,0.00,35.50",
            "h2,p3,71,88.1,0.00,1100.00,0.00",
        )
        buf = io.StringIO()
        save_population(pop, buf)
        again = load_population(io.StringIO(buf.getvalue()))
        assert again.person_id == pop.person_id
        assert again.household_id == pop.household_id
        assert np.array_equal(again.age, pop.age)
        assert np.array_equal(again.weight_scaled, pop.weight_scaled)
        assert np.array_equal(again.market, pop.market)
        assert np.array_equal(again.pension, pop.pension)
        assert np.array_equal(again.other, pop.other)

    def test_round_trip_synthetic(self, small_population):
        buf = io.StringIO()
        save_population(small_population, buf)
        again = load_population(io.StringIO(buf.getvalue()))
        buf2 = io.StringIO()
        save_population(again, buf2)
        assert buf.getvalue() == buf2.getvalue()


class TestPerCapita:
    def household(self, *incomes):
        members = tuple(
            person(pid=f"p{i}", market=m) for i, m in enumerate(incomes)
        )
        return Household(household_id="h1", members=members)

    def test_mean(self):
        hh = self.household(90000, 30000, 0)
        assert per_capita(hh, lambda p: p.market_income) == 40000

    def test_singleton(self):
        hh = self.household(40600)
        assert per_capita(hh, lambda p: p.market_income) == 40600

    def test_exact_half_centavo(self):
        hh = self.household(10000, 10100)
        assert per_capita(hh, lambda p: p.market_income) == 10050

    def test_rounding_half_up(self):
        hh = self.household(10001, 10002)  # mean 100.015 -> 100.02
        assert per_capita(hh, lambda p: p.market_income) == 10002

    @given(
        incomes=st.lists(st.integers(min_value=0, max_value=10**8), min_size=1, max_size=8),
        k=st.integers(min_value=-(10**6), max_value=10**6),
    )
    def test_translation_equivariance(self, incomes, k):
        hh = self.household(*incomes)
        shifted = Household(
            household_id="h1",
            members=tuple(
                person(pid=f"p{i}", market=m + k + 10**6)
                for i, m in enumerate(incomes)
            ),
        )
        base = per_capita(hh, lambda p: p.market_income)
        assert per_capita(shifted, lambda p: p.market_income) == base + k + 10**6

    def test_vectorized_matches_scalar(self, small_population):
        pop = small_population
        pc = pop.per_capita_by_household(pop.market)
        offset = 0
        for hh in pop.households():
            expected = per_capita(hh, lambda p: p.market_income)
            for j in range(len(hh)):
                assert pc[offset + j] == expected
            offset += len(hh)


class TestWeightedMedian:
    def test_odd_unweighted(self):
        assert weighted_median([(100, 1), (200, 1), (300, 1)]) == 200

    def test_cumulative_weight_rule(self):
        # half the total weight (2.0) is reached already at the first value
        assert weighted_median([(100, 3), (900, 1)]) == 100

    def test_singleton(self):
        assert weighted_median([(5, 1)]) == 5

    def test_empty(self):
        with pytest.raises(EmptyInput):
            weighted_median([])

    def test_non_positive_weight(self):
        with pytest.raises(ValueError):
            weighted_median([(1, 0)])

    @given(
        data=st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=10**6),
                st.integers(min_value=1, max_value=1000),
            ),
            min_size=1,
            max_size=50,
        ),
        scale=st.integers(min_value=1, max_value=100),
    )
    @settings(max_examples=200)
    def test_scale_and_weight_invariance(self, data, scale):
        m = weighted_median(data)
        assert weighted_median([(v * scale, w) for v, w in data]) == m * scale
        assert weighted_median([(v, w * scale) for v, w in data]) == m


class TestSynthGenerate:
    def test_deterministic_byte_identical(self):
        spec = SynthSpec(n_households=150, seed=42)
        a, b = synth_generate(spec), synth_generate(spec)
        buf_a, buf_b = io.StringIO(), io.StringIO()
        save_population(a, buf_a)
        save_population(b, buf_b)
        assert buf_a.getvalue() == buf_b.getvalue()

    def test_postconditions(self):
        pop = synth_generate(SynthSpec(n_households=100, seed=7))
        assert pop.n_households == 100
        assert float(pop.total_weight_exact) > 0
        ages = pop.age
        assert (ages <= 17).any() and ((ages >= 18) & (ages <= 64)).any() and (ages >= 65).any()
        assert pop.market.min() >= 0 and pop.pension.min() >= 0 and pop.other.min() >= 0
        # pensions predominantly to the elderly
        elderly_pension = pop.pension[ages >= 65].sum()
        assert elderly_pension > 0.8 * pop.pension.sum()
        assert len(set(pop.person_id)) == len(pop)

    def test_age_mixture_excluding_children(self):
        pop = synth_generate(SynthSpec(n_households=80, seed=3, age_mix=(0.0, 0.8, 0.2)))
        assert not (pop.age <= 17).any()

    def test_invalid_specs(self):
        with pytest.raises(InvalidSpec):
            SynthSpec(n_households=0, seed=1).validate()
        with pytest.raises(InvalidSpec):
            SynthSpec(n_households=5, seed=1, age_mix=(0.0, 0.0, 0.0)).validate()
        with pytest.raises(InvalidSpec):
            SynthSpec(n_households=5, seed=1, household_size_probs=(0.0,)).validate()
        with pytest.raises(InvalidSpec):
            SynthSpec(n_households=5, seed=1, income_sigma=-1).validate()

    def test_population_immutable(self, small_population):
        with pytest.raises(AttributeError):
            small_population.market = None
