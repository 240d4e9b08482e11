import numpy as np
import pytest

from conftest import person
from ubisim.baseline import BaselinePolicy, BracketSchedule, baseline_disposable
from ubisim.errors import InvalidSpec, UnsolvedRate
from ubisim.microdata import Population
from ubisim.money import parse_brl
from ubisim.pipeline import run_simulation
from ubisim.presets import load_baseline_policy
from ubisim.reform import (
    FlatTax,
    OffsetRule,
    SchemeSpec,
    TwoBracketTax,
    UbiSchedule,
    apply_scheme,
    offset_pension,
    two_bracket_tax,
    ubi_amount,
    ubi_amount_array,
)

OFFSETS_ON = OffsetRule(pensions_reduced_by_ubi=True, other_benefits_abolished=True)
OFFSETS_OFF = OffsetRule(pensions_reduced_by_ubi=False, other_benefits_abolished=False)


class TestUbiAmount:
    def test_uniform_scheme(self, scheme1):
        assert ubi_amount(30, scheme1.ubi) == 40600

    def test_child_half(self, scheme2):
        assert ubi_amount(10, scheme2.ubi) == 20300

    def test_elderly_double(self, scheme2):
        assert ubi_amount(70, scheme2.ubi) == 81200

    def test_band_breakpoints(self, scheme2):
        assert ubi_amount(17, scheme2.ubi) == 20300
        assert ubi_amount(18, scheme2.ubi) == 40600
        assert ubi_amount(64, scheme2.ubi) == 40600
        assert ubi_amount(65, scheme2.ubi) == 81200

    def test_array_matches_scalar(self, scheme2):
        ages = np.array([0, 17, 18, 40, 64, 65, 99], dtype=np.int32)
        assert ubi_amount_array(ages, scheme2.ubi).tolist() == [
            ubi_amount(int(a), scheme2.ubi) for a in ages
        ]

    def test_invalid_schedule(self):
        with pytest.raises(InvalidSpec):
            UbiSchedule(child_amount=-1, adult_amount=0, elderly_amount=0)
        with pytest.raises(InvalidSpec):
            UbiSchedule(
                child_amount=0, adult_amount=0, elderly_amount=0,
                child_max_age=70, elderly_min_age=65,
            )


class TestOffsetPension:
    def test_reduced(self):
        assert offset_pension(100000, 40600, OFFSETS_ON) == 59400

    def test_floors_at_zero(self):
        assert offset_pension(30000, 40600, OFFSETS_ON) == 0

    def test_identity_without_ubi(self):
        assert offset_pension(50000, 0, OFFSETS_ON) == 50000

    def test_rule_disabled(self):
        assert offset_pension(30000, 40600, OFFSETS_OFF) == 30000


class TestTwoBracketTax:
    DESIGN = TwoBracketTax(lower_rate=0.20, threshold=170000, upper_rate=0.475)

    def test_below_threshold_leg_only(self):
        assert two_bracket_tax(170000, self.DESIGN) == 34000

    def test_both_legs(self):
        # 340.00 + 47.5% x 1000.00 = 815.00
        assert two_bracket_tax(270000, self.DESIGN) == 81500

    def test_zero(self):
        assert two_bracket_tax(0, self.DESIGN) == 0

    def test_unsolved_rejected(self):
        with pytest.raises(UnsolvedRate):
            two_bracket_tax(100, TwoBracketTax(lower_rate=0.2, threshold=1000))


def flat_scheme(rate, ubi_amount_c=40600, offsets=OFFSETS_ON, **kw):
    return SchemeSpec(
        name="test",
        ubi=UbiSchedule(ubi_amount_c, ubi_amount_c, ubi_amount_c),
        tax=FlatTax(rate=rate),
        offset=offsets,
        **kw,
    )


def null_policy():
    zero = BracketSchedule(brackets=((0, 0.0),))
    return BaselinePolicy(pit=zero, ssc=zero)


class TestApplyScheme:
    def test_elderly_offset_exhausts_pension(self, scheme2):
        pop = Population([person(age=70, pension=81200)])
        baseline = baseline_disposable(pop, null_policy())
        outcome = apply_scheme(pop, baseline, scheme2.with_rate(0.326))
        assert outcome.ubi.tolist() == [81200]
        assert outcome.remaining_pension.tolist() == [0]
        assert outcome.tax.tolist() == [0]
        assert outcome.disposable.tolist() == [81200]

    def test_flat_scheme_symbolic(self, scheme1):
        # market 1000, other 200 abolished: disposable = 1000(1 - t) + 406
        pop = Population([person(age=30, market=100000, other=20000)])
        baseline = baseline_disposable(pop, null_policy())
        outcome = apply_scheme(pop, baseline, scheme1.with_rate(0.357))
        assert outcome.disposable.tolist() == [parse_brl("1049.00")]

    def test_identity_reform_noop(self):
        # flat baseline tax replicated by the reform over a population with
        # no other benefits (the reform taxes those, the baseline PIT does not)
        from ubisim.microdata import SynthSpec, synth_generate

        rate = 0.25
        pop = synth_generate(SynthSpec(n_households=200, seed=5, benefit_take_up=0.0))
        policy = BaselinePolicy(
            pit=BracketSchedule(brackets=((0, rate),)),
            ssc=BracketSchedule(brackets=((0, 0.0),)),
        )
        baseline = baseline_disposable(pop, policy)
        spec = SchemeSpec(
            name="noop",
            ubi=UbiSchedule(0, 0, 0),
            tax=FlatTax(rate=rate),
            offset=OFFSETS_OFF,
        )
        outcome = apply_scheme(pop, baseline, spec)
        assert np.array_equal(outcome.disposable, baseline.disposable)

    def test_unsolved_rate_rejected(self, small_population, scheme1):
        baseline = baseline_disposable(small_population, null_policy())
        with pytest.raises(UnsolvedRate):
            apply_scheme(small_population, baseline, scheme1)

    def test_accounting_identity_exact(self, medium_population, scheme2):
        pop = medium_population
        baseline = baseline_disposable(pop, load_baseline_policy())
        outcome = apply_scheme(pop, baseline, scheme2.with_rate(0.33))
        lhs = outcome.disposable
        rhs = (
            pop.market + outcome.remaining_pension + outcome.remaining_other
            + outcome.ubi - outcome.tax
        )
        assert np.array_equal(lhs, rhs)
        # taxable base excludes the UBI
        assert np.array_equal(
            outcome.taxable,
            pop.market + outcome.remaining_pension + outcome.remaining_other,
        )

    def test_taxable_includes_ubi_when_flagged(self, small_population):
        pop = small_population
        baseline = baseline_disposable(pop, null_policy())
        spec = flat_scheme(0.2, ubi_taxable=True)
        outcome = apply_scheme(pop, baseline, spec)
        assert np.array_equal(
            outcome.taxable,
            pop.market + outcome.remaining_pension + outcome.remaining_other + outcome.ubi,
        )

    def test_net_cost_identities(self, medium_population, scheme2):
        pop = medium_population
        baseline = baseline_disposable(pop, load_baseline_policy())
        outcome = apply_scheme(pop, baseline, scheme2.with_rate(0.3))
        agg = outcome.aggregates
        assert agg.ubi_net_cost == agg.ubi_gross_cost - agg.transfer_reduction
        current = baseline.aggregates.pensions + baseline.aggregates.other_transfers
        assert agg.remaining_transfers == current - agg.transfer_reduction


class TestSchemeOnePovertyElimination:
    @pytest.mark.parametrize("seed", [1, 2, 3])
    def test_headcount_zero(self, seed, scheme1):
        from ubisim.microdata import SynthSpec, synth_generate
        from ubisim.stats import poverty_headcount

        pop = synth_generate(SynthSpec(n_households=250, seed=seed))
        run = run_simulation(pop, scheme1)
        headcount = poverty_headcount(run.view, scheme1.poverty_line, "reform", "all")
        assert headcount == 0.0
