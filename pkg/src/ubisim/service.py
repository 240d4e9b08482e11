"""Stateless what-if HTTP service over one in-memory population.

The population and baseline are loaded once at startup and shared read-only;
every /simulate request is a pure function of (population, request). Numbers
in responses are full precision (money in BRL, shares in percent); display
rounding is the client's job.
"""

from __future__ import annotations

from typing import Literal, Union

from fastapi import FastAPI, Request
from fastapi.encoders import jsonable_encoder
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field, field_validator

from . import __version__
from .baseline import BaselinePolicy, baseline_disposable
from .errors import InfeasibleNeutrality, SimulationError
from .microdata import Population
from .money import CENTS, parse_brl
from .pipeline import default_policy_for, run_simulation
from .presets import PRESET_NAMES, load_scheme, scheme_from_dict
from .report import Report, scheme_manifest
from .stats import (
    GROUPS,
    IndividualIncomeView,
    poverty_headcount,
    weighted_gini,
)

RateOrSolve = Union[float, Literal["solve"]]


class UbiModel(BaseModel):
    child: str = Field(description="monthly BRL, decimal string")
    adult: str
    elderly: str
    child_max_age: int = 17
    elderly_min_age: int = 65

    @field_validator("child", "adult", "elderly")
    @classmethod
    def _non_negative_money(cls, v: str) -> str:
        if parse_brl(v) < 0:
            raise ValueError("UBI amounts must be non-negative")
        return v


class OffsetsModel(BaseModel):
    pensions_reduced_by_ubi: bool = True
    other_benefits_abolished: bool = True


class FlatTaxModel(BaseModel):
    type: Literal["flat"]
    rate: RateOrSolve = "solve"

    @field_validator("rate")
    @classmethod
    def _rate_range(cls, v):
        if isinstance(v, float) and not 0.0 <= v < 1.0:
            raise ValueError("rate must lie in [0, 1)")
        return v


class TwoBracketTaxModel(BaseModel):
    type: Literal["two_bracket"]
    lower_rate: float
    threshold: str | None = None  # null derives from the data
    upper_rate: RateOrSolve = "solve"

    @field_validator("lower_rate")
    @classmethod
    def _lower_range(cls, v: float) -> float:
        if not 0.0 <= v < 1.0:
            raise ValueError("lower_rate must lie in [0, 1)")
        return v

    @field_validator("upper_rate")
    @classmethod
    def _upper_range(cls, v):
        if isinstance(v, float) and not 0.0 <= v < 1.0:
            raise ValueError("upper_rate must lie in [0, 1)")
        return v

    @field_validator("threshold")
    @classmethod
    def _threshold_positive(cls, v):
        if v is not None and parse_brl(v) <= 0:
            raise ValueError("threshold must be positive")
        return v


class SchemeModel(BaseModel):
    name: str = "custom"
    ubi: UbiModel
    offsets: OffsetsModel = OffsetsModel()
    tax: FlatTaxModel | TwoBracketTaxModel
    ubi_taxable: bool = False
    poverty_line: str = "406.00"

    @field_validator("poverty_line")
    @classmethod
    def _line_positive(cls, v: str) -> str:
        if parse_brl(v) <= 0:
            raise ValueError("poverty_line must be positive")
        return v


class SimulateRequest(BaseModel):
    scheme: SchemeModel
    poverty_line: str | None = None


def _report_payload(report: Report) -> dict:
    budget = report.manifest["budget_cents_per_year"]
    poverty = report.poverty
    return {
        "scheme": report.manifest["scheme"],
        "solver": report.manifest["solver"],
        "budget_brl_per_year": {k: v / CENTS for k, v in budget.items()},
        "poverty_line_brl": report.manifest["poverty_line_brl"],
        "poverty_inequality": {
            "headcount_baseline": poverty.headcount_baseline,
            "headcount_reform": poverty.headcount_reform,
            "headcount_reduction_pct": {
                g: poverty.headcount_reduction_pct(g) for g in GROUPS
            },
            "gini_baseline": poverty.gini_baseline,
            "gini_reform": poverty.gini_reform,
            "gini_reduction_pct": poverty.gini_reduction_pct,
        },
        "deciles": [
            {
                "decile": row.decile,
                "winners_pct": row.winners_pct,
                "winners_mean_baseline_brl": _brl(row.winners_mean_baseline),
                "winners_mean_gain_brl": _brl(row.winners_mean_gain),
                "losers_pct": row.losers_pct,
                "losers_mean_baseline_brl": _brl(row.losers_mean_baseline),
                "losers_mean_loss_brl": _brl(row.losers_mean_loss),
                "unchanged_pct": row.unchanged_pct,
            }
            for row in report.deciles
        ],
        "figure_series": [
            {
                "decile": row.decile,
                "winners_pct": row.winners_pct,
                "losers_pct": row.losers_pct,
                "gain_pct_of_baseline": row.gain_pct_of_baseline,
                "loss_pct_of_baseline": row.loss_pct_of_baseline,
            }
            for row in report.figure_series
        ],
        "population_fingerprint": report.manifest["population_fingerprint"],
    }


def _brl(cents: float | None) -> float | None:
    return None if cents is None else cents / CENTS


def create_app(population: Population, policy: BaselinePolicy | None = None) -> FastAPI:
    """Build the service around one immutable population."""
    if policy is None:
        policy = default_policy_for(population)
    baseline = baseline_disposable(population, policy)

    # Baseline-only indicators are static; compute the view once at startup.
    pc_baseline = population.per_capita_by_household(baseline.disposable)
    baseline_view = IndividualIncomeView(
        weight=population.weight,
        age=population.age,
        pc_baseline=pc_baseline,
        pc_reform=pc_baseline,
        household_id=population.household_id,
        person_id=population.person_id,
    )

    app = FastAPI(title="ubisim what-if service", version=__version__)
    # The browser UI is served separately (static files); permissive CORS
    # keeps this single-analyst tool usable from any local origin.
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(RequestValidationError)
    async def malformed_spec(_: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"detail": jsonable_encoder(exc.errors())})

    @app.exception_handler(InfeasibleNeutrality)
    async def infeasible(_: Request, exc: InfeasibleNeutrality):
        return JSONResponse(
            status_code=422,
            content={
                "detail": {
                    "error": "infeasible_neutrality",
                    "message": str(exc),
                    "shortfall_brl_per_year": exc.shortfall_cents_per_year / CENTS,
                }
            },
        )

    @app.exception_handler(SimulationError)
    async def engine_rejection(_: Request, exc: SimulationError):
        return JSONResponse(
            status_code=400,
            content={"detail": {"error": type(exc).__name__, "message": str(exc)}},
        )

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "version": __version__,
            "population_fingerprint": population.fingerprint(),
            "persons": population.summary.persons,
            "households": population.summary.households,
        }

    @app.get("/baseline")
    def baseline_endpoint():
        agg = baseline.aggregates
        line = parse_brl("406.00")
        return {
            "policy": policy.name,
            "budget_brl_per_year": {
                "initial_income": float(agg.market) / CENTS,
                "pensions": float(agg.pensions) / CENTS,
                "other_transfers": float(agg.other_transfers) / CENTS,
                "personal_income_tax": float(agg.pit) / CENTS,
                "employee_social_contribution": float(agg.ssc) / CENTS,
                "disposable": float(agg.disposable) / CENTS,
            },
            "poverty_line_brl": "406.00",
            "headcount": {
                g: poverty_headcount(baseline_view, line, "baseline", g) for g in GROUPS
            },
            "gini": weighted_gini(baseline_view.pc_baseline, baseline_view.weight),
            "population_fingerprint": population.fingerprint(),
        }

    @app.get("/presets")
    def presets():
        return {
            "presets": [scheme_manifest(load_scheme(name)) for name in PRESET_NAMES]
        }

    @app.post("/simulate")
    def simulate(request: SimulateRequest):
        doc = request.scheme.model_dump()
        scheme = scheme_from_dict(doc)
        line = parse_brl(request.poverty_line) if request.poverty_line else None
        run = run_simulation(
            population, scheme, policy=policy, poverty_line=line, baseline=baseline
        )
        return _report_payload(run.report)

    return app
