/**
 * Wire types for the simulation service API (see docs/api.md in the repo
 * root). Money strings are decimal BRL ("406.00"); rates are fractions in
 * [0, 1) or the literal "solve".
 */

export type RateOrSolve = number | "solve";

export interface UbiDoc {
  child: string;
  adult: string;
  elderly: string;
  child_max_age: number;
  elderly_min_age: number;
}

export interface OffsetsDoc {
  pensions_reduced_by_ubi: boolean;
  other_benefits_abolished: boolean;
}

export interface FlatTaxDoc {
  type: "flat";
  rate: RateOrSolve;
}

export interface TwoBracketTaxDoc {
  type: "two_bracket";
  lower_rate: number;
  threshold: string | null;
  upper_rate: RateOrSolve;
}

export interface SchemeDoc {
  name: string;
  ubi: UbiDoc;
  offsets: OffsetsDoc;
  tax: FlatTaxDoc | TwoBracketTaxDoc;
  ubi_taxable: boolean;
  poverty_line: string;
}

export interface HealthResponse {
  status: string;
  version: string;
  population_fingerprint: string;
  persons: number;
  households: number;
}

export interface BaselineResponse {
  policy: string;
  budget_brl_per_year: Record<string, number>;
  poverty_line_brl: string;
  headcount: Record<string, number | null>;
  gini: number;
  population_fingerprint: string;
}

export interface PresetsResponse {
  presets: SchemeDoc[];
}

export interface SolverDiagnostics {
  method: string;
  rate: number;
  lower_rate: number | null;
  required_revenue_cents_per_year: number;
  residual_cents_per_year: number;
  surplus_cents_per_year: number;
  iterations: number;
}

export interface DecileRow {
  decile: number | "all";
  winners_pct: number;
  winners_mean_baseline_brl: number | null;
  winners_mean_gain_brl: number | null;
  losers_pct: number;
  losers_mean_baseline_brl: number | null;
  losers_mean_loss_brl: number | null;
  unchanged_pct: number;
}

export interface FigureRow {
  decile: number | "all";
  winners_pct: number;
  losers_pct: number;
  gain_pct_of_baseline: number | null;
  loss_pct_of_baseline: number | null;
}

export interface PovertyInequality {
  headcount_baseline: Record<string, number | null>;
  headcount_reform: Record<string, number | null>;
  headcount_reduction_pct: Record<string, number | null>;
  gini_baseline: number;
  gini_reform: number;
  gini_reduction_pct: number;
}

export interface SimulateResponse {
  scheme: SchemeDoc;
  solver: SolverDiagnostics;
  budget_brl_per_year: Record<string, number>;
  poverty_line_brl: string;
  poverty_inequality: PovertyInequality;
  deciles: DecileRow[];
  figure_series: FigureRow[];
  population_fingerprint: string;
}

export interface InfeasibleDetail {
  error: "infeasible_neutrality";
  message: string;
  shortfall_brl_per_year: number;
}

/** Discriminated request outcome the controller renders from. */
export type SimulateOutcome =
  | { kind: "ok"; response: SimulateResponse }
  | { kind: "infeasible"; detail: InfeasibleDetail }
  | { kind: "rejected"; status: number; message: string }
  | { kind: "network"; message: string };
