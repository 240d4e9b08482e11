/**
 * Pure render functions: every number shown comes from a service response
 * field; the client formats but never recomputes statistics.
 */

import type {
  BaselineResponse,
  DecileRow,
  FigureRow,
  SimulateResponse,
} from "./types.js";

const esc = (s: string) =>
  s.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export const fmtPct = (x: number | null | undefined): string =>
  x == null ? "–" : `${x.toFixed(1)}%`;

export const fmtGini = (x: number): string => x.toFixed(3);

export const fmtBrl = (x: number | null | undefined): string =>
  x == null
    ? "–"
    : `R$ ${x.toLocaleString("en-US", { minimumFractionDigits: 2, maximumFractionDigits: 2 })}`;

export const fmtBillions = (brlPerYear: number): string =>
  `${(brlPerYear / 1e9).toFixed(2)} bn/yr`;

const shareFraction = (x: number | null): string =>
  x == null ? "–" : `${(100 * x).toFixed(1)}%`;

export function renderHeadlineCards(result: SimulateResponse): string {
  const pi = result.poverty_inequality;
  const solver = result.solver;
  const rateCard =
    solver.lower_rate != null
      ? `${fmtPct(100 * solver.rate)} <span class="sub">upper</span> / ${fmtPct(
          100 * solver.lower_rate,
        )} <span class="sub">reduced</span>`
      : fmtPct(100 * solver.rate);
  return `
    <div class="card">
      <div class="card-label">budget-neutral rate</div>
      <div class="card-value" data-field="solved-rate">${rateCard}</div>
      <div class="card-hint">${esc(solver.method)}</div>
    </div>
    <div class="card">
      <div class="card-label">poverty headcount</div>
      <div class="card-value" data-field="poverty">
        ${shareFraction(pi.headcount_baseline.all ?? null)} → ${shareFraction(
          pi.headcount_reform.all ?? null,
        )}
      </div>
      <div class="card-hint">reduction ${fmtPct(pi.headcount_reduction_pct.all ?? null)}</div>
    </div>
    <div class="card">
      <div class="card-label">Gini</div>
      <div class="card-value" data-field="gini">
        ${fmtGini(pi.gini_baseline)} → ${fmtGini(pi.gini_reform)}
      </div>
      <div class="card-hint">reduction ${fmtPct(pi.gini_reduction_pct)}</div>
    </div>
    <div class="card">
      <div class="card-label">UBI net cost</div>
      <div class="card-value" data-field="net-cost">
        ${fmtBillions(result.budget_brl_per_year.ubi_net_cost ?? 0)}
      </div>
      <div class="card-hint">gross ${fmtBillions(result.budget_brl_per_year.ubi_gross_cost ?? 0)}</div>
    </div>`;
}

const BUDGET_ROWS: Array<[string, string, "current" | "reform"]> = [
  ["initial_income", "Initial (market) income", "current"],
  ["current_pensions", "Pensions", "current"],
  ["current_other_transfers", "Other transfers", "current"],
  ["current_pit", "Personal income tax", "current"],
  ["current_ssc", "Employee social contribution", "current"],
  ["current_disposable", "Disposable income", "current"],
  ["ubi_gross_cost", "UBI gross cost", "reform"],
  ["transfer_reduction", "Reduction in current transfers", "reform"],
  ["ubi_net_cost", "UBI net cost", "reform"],
  ["remaining_transfers", "Remaining transfers", "reform"],
  ["reform_tax_revenue", "Tax revenue under reform", "reform"],
  ["reform_disposable", "Disposable income under reform", "reform"],
];

export function renderBudgetTable(budget: Record<string, number>): string {
  const rows = BUDGET_ROWS.map(([key, label, side]) => {
    const value = budget[key];
    return `<tr class="${side}"><td>${esc(label)}</td><td class="num">${
      value == null ? "–" : fmtBillions(value)
    }</td></tr>`;
  }).join("");
  return `<table class="budget"><thead><tr><th>item</th><th>BRL/year</th></tr></thead><tbody>${rows}</tbody></table>`;
}

export function renderDecileTable(rows: DecileRow[]): string {
  const body = rows
    .map(
      (r) => `
      <tr data-decile="${r.decile}">
        <td>${r.decile}</td>
        <td class="num">${fmtPct(r.winners_pct)}</td>
        <td class="num">${fmtBrl(r.winners_mean_baseline_brl)}</td>
        <td class="num">${fmtBrl(r.winners_mean_gain_brl)}</td>
        <td class="num">${fmtPct(r.losers_pct)}</td>
        <td class="num">${fmtBrl(r.losers_mean_baseline_brl)}</td>
        <td class="num">${fmtBrl(r.losers_mean_loss_brl)}</td>
      </tr>`,
    )
    .join("");
  return `
    <table class="deciles">
      <thead>
        <tr>
          <th>decile</th><th>winners</th><th>baseline</th><th>gain</th>
          <th>losers</th><th>baseline</th><th>loss</th>
        </tr>
      </thead>
      <tbody>${body}</tbody>
    </table>`;
}

/**
 * Two-panel SVG bar chart per decile: shares of winners/losers, then mean
 * gain/loss as % of the group's baseline income (losses drawn downward).
 * Hovering a bar shows the absolute R$/month value from the decile table.
 */
export function renderDecileChart(series: FigureRow[], deciles: DecileRow[]): string {
  const rows = series.filter((r) => r.decile !== "all");
  const byDecile = new Map(deciles.map((d) => [d.decile, d]));
  const width = 640;
  const barW = 22;
  const gap = 18;
  const x0 = 44;

  const sharesH = 150;
  const shareBars = rows
    .map((r, i) => {
      const x = x0 + i * (2 * barW + gap);
      const winH = (r.winners_pct / 100) * (sharesH - 20);
      const loseH = (r.losers_pct / 100) * (sharesH - 20);
      const d = byDecile.get(r.decile);
      return `
        <rect class="win" x="${x}" y="${sharesH - winH}" width="${barW}" height="${winH}">
          <title>decile ${r.decile}: winners ${fmtPct(r.winners_pct)} (avg gain ${fmtBrl(
            d?.winners_mean_gain_brl ?? null,
          )}/month)</title>
        </rect>
        <rect class="lose" x="${x + barW + 2}" y="${sharesH - loseH}" width="${barW}" height="${loseH}">
          <title>decile ${r.decile}: losers ${fmtPct(r.losers_pct)} (avg loss ${fmtBrl(
            d?.losers_mean_loss_brl ?? null,
          )}/month)</title>
        </rect>
        <text class="tick" x="${x + barW}" y="${sharesH + 14}">${r.decile}</text>`;
    })
    .join("");

  const changeH = 190;
  const maxChange = Math.max(
    20,
    ...rows.map((r) => Math.max(r.gain_pct_of_baseline ?? 0, r.loss_pct_of_baseline ?? 0)),
  );
  const zeroY = changeH * 0.55;
  const scale = (zeroY - 12) / maxChange;
  const changeBars = rows
    .map((r, i) => {
      const x = x0 + i * (2 * barW + gap);
      const gain = (r.gain_pct_of_baseline ?? 0) * scale;
      const loss = (r.loss_pct_of_baseline ?? 0) * scale;
      const d = byDecile.get(r.decile);
      return `
        <rect class="win" x="${x}" y="${zeroY - gain}" width="${barW}" height="${gain}">
          <title>decile ${r.decile}: avg gain ${fmtPct(r.gain_pct_of_baseline)} of baseline (${fmtBrl(
            d?.winners_mean_gain_brl ?? null,
          )}/month)</title>
        </rect>
        <rect class="lose" x="${x + barW + 2}" y="${zeroY}" width="${barW}" height="${loss}">
          <title>decile ${r.decile}: avg loss ${fmtPct(r.loss_pct_of_baseline)} of baseline (${fmtBrl(
            d?.losers_mean_loss_brl ?? null,
          )}/month)</title>
        </rect>`;
    })
    .join("");

  return `
    <figure>
      <figcaption>Winners and losers by baseline income decile (%)</figcaption>
      <svg viewBox="0 0 ${width} ${sharesH + 20}" role="img">${shareBars}</svg>
      <figcaption>Average gain/loss as % of group baseline income</figcaption>
      <svg viewBox="0 0 ${width} ${changeH}" role="img">
        <line x1="${x0 - 8}" y1="${zeroY}" x2="${width - 8}" y2="${zeroY}" class="axis" />
        ${changeBars}
      </svg>
    </figure>`;
}

export function renderBaselinePanel(baseline: BaselineResponse): string {
  return `
    <div class="baseline-summary">
      population <code>${esc(baseline.population_fingerprint)}</code>,
      baseline Gini ${fmtGini(baseline.gini)},
      poverty ${shareFraction(baseline.headcount.all ?? null)}
      at line R$ ${esc(baseline.poverty_line_brl)}/month
    </div>`;
}

export function renderError(status: number | "network", message: string): string {
  const label = status === "network" ? "service unreachable" : `request failed (HTTP ${status})`;
  return `<div class="banner error" data-kind="${status}"><strong>${label}</strong> ${esc(
    message,
  )}</div>`;
}

export function renderInfeasible(message: string, shortfallBrlPerYear: number): string {
  return `
    <div class="banner infeasible" data-kind="infeasible">
      <strong>this scheme cannot be financed</strong>
      <div>${esc(message)}</div>
      <div>annual shortfall: ${fmtBillions(shortfallBrlPerYear)}</div>
    </div>`;
}
