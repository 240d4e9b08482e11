"""Static tax-benefit microsimulation of universal basic income reforms.

Computes baseline disposable income over weighted household survey
microdata, applies UBI schemes with benefit offsets and replacement taxes,
solves budget-neutral tax rates in closed form, and produces poverty,
inequality, and decile winner/loser analytics.
"""

__version__ = "0.1.0"

from .baseline import (  # noqa: F401
    BaselinePolicy,
    BaselineResult,
    BracketSchedule,
    baseline_disposable,
    schedule_tax,
)
from .microdata import (  # noqa: F401
    Household,
    PersonRecord,
    Population,
    SynthSpec,
    load_population,
    per_capita,
    save_population,
    synth_generate,
    weighted_median,
)
from .reform import (  # noqa: F401
    FlatTax,
    OffsetRule,
    ReformOutcome,
    SchemeSpec,
    TwoBracketTax,
    UbiSchedule,
    apply_scheme,
    offset_pension,
    two_bracket_tax,
    ubi_amount,
)
from .solver import (  # noqa: F401
    NeutralityProblem,
    SolvedRates,
    bisection_check,
    required_revenue,
    solve_flat_rate,
    solve_upper_rate,
)
from .stats import (  # noqa: F401
    DecileAssignment,
    IndividualIncomeView,
    assign_deciles,
    build_income_view,
    poverty_headcount,
    weighted_gini,
    winners_losers,
)
from .report import Report, build_report, serialize_report  # noqa: F401
from .pipeline import SimulationRun, run_simulation  # noqa: F401
