/**
 * Browser-level contract tests against a fixture service: the app is
 * mounted into a real DOM (happy-dom) and driven through input events;
 * fetch is replaced by an in-memory service whose solved rate rises
 * strictly with the adult UBI amount and which turns infeasible past a
 * financing cliff.
 */

import { afterEach, beforeEach, describe, expect, it, vi } from "vitest";

import { ApiClient } from "../src/api.js";
import { App, DEBOUNCE_MS, mountApp } from "../src/app.js";
import type { DecileRow, FigureRow, SchemeDoc, SimulateResponse } from "../src/types.js";

const PRESETS: SchemeDoc[] = [
  preset("scheme1", "406.00", "406.00", "406.00", { type: "flat", rate: "solve" }),
  preset("scheme2", "203.00", "406.00", "812.00", { type: "flat", rate: "solve" }),
  preset("scheme3", "203.00", "406.00", "812.00", {
    type: "two_bracket",
    lower_rate: 0.2,
    threshold: null,
    upper_rate: "solve",
  }),
];

function preset(
  name: string,
  child: string,
  adult: string,
  elderly: string,
  tax: SchemeDoc["tax"],
): SchemeDoc {
  return {
    name,
    ubi: { child, adult, elderly, child_max_age: 17, elderly_min_age: 65 },
    offsets: { pensions_reduced_by_ubi: true, other_benefits_abolished: true },
    tax,
    ubi_taxable: false,
    poverty_line: "406.00",
  };
}

/** Solved rate rises strictly with the adult amount; cliff at R$2,000. */
function fixtureSimulate(scheme: SchemeDoc): { status: number; body: unknown } {
  const adult = Number(scheme.ubi.adult);
  if (adult > 2000) {
    return {
      status: 422,
      body: {
        detail: {
          error: "infeasible_neutrality",
          message: `budget neutrality would need a tax rate of 131.0% at adult UBI ${scheme.ubi.adult}`,
          shortfall_brl_per_year: (adult - 2000) * 1e9,
        },
      },
    };
  }
  const rate = 0.2 + adult / 5000;
  const deciles: DecileRow[] = [];
  const series: FigureRow[] = [];
  for (let d = 1; d <= 10; d++) {
    deciles.push({
      decile: d,
      winners_pct: Math.max(0, 100 - d * 9),
      winners_mean_baseline_brl: 100 * d,
      winners_mean_gain_brl: 300 - 20 * d,
      losers_pct: Math.min(100, d * 9),
      losers_mean_baseline_brl: 120 * d,
      losers_mean_loss_brl: 10 * d,
      unchanged_pct: 0,
    });
    series.push({
      decile: d,
      winners_pct: Math.max(0, 100 - d * 9),
      losers_pct: Math.min(100, d * 9),
      gain_pct_of_baseline: (300 - 20 * d) / d,
      loss_pct_of_baseline: 10,
    });
  }
  const response: SimulateResponse = {
    scheme: { ...scheme, tax: { type: "flat", rate } },
    solver: {
      method: "closed_form",
      rate,
      lower_rate: scheme.tax.type === "two_bracket" ? scheme.tax.lower_rate : null,
      required_revenue_cents_per_year: 1e14 * rate,
      residual_cents_per_year: 0,
      surplus_cents_per_year: 0,
      iterations: 0,
    },
    budget_brl_per_year: {
      initial_income: 8.8e10,
      current_disposable: 9.2e10,
      ubi_gross_cost: 3.1e10,
      transfer_reduction: 0.9e10,
      ubi_net_cost: 2.2e10,
      remaining_transfers: 0.2e10,
      reform_tax_revenue: 3.3e10,
      reform_disposable: 9.2e10,
    },
    poverty_line_brl: scheme.poverty_line,
    poverty_inequality: {
      headcount_baseline: { all: 0.204, children: 0.337, working_age: 0.175, elderly: 0.044 },
      headcount_reform: { all: 0.1, children: 0.2, working_age: 0.08, elderly: 0.001 },
      headcount_reduction_pct: { all: 51.0, children: 40.6, working_age: 54.3, elderly: 97.7 },
      gini_baseline: 0.5,
      gini_reform: 0.42,
      gini_reduction_pct: 16.0,
    },
    deciles: [
      ...deciles,
      { ...deciles[0]!, decile: "all" },
    ],
    figure_series: [...series, { ...series[0]!, decile: "all" }],
    population_fingerprint: "fixturefingerprint",
  };
  return { status: 200, body: response };
}

let simulateCalls: SchemeDoc[] = [];

function installFixtureFetch(): void {
  simulateCalls = [];
  vi.stubGlobal(
    "fetch",
    vi.fn(async (url: string, init?: RequestInit) => {
      const path = new URL(url, "http://fixture").pathname;
      if (path === "/presets") return jsonResponse(200, { presets: PRESETS });
      if (path === "/health") {
        return jsonResponse(200, {
          status: "ok",
          version: "test",
          population_fingerprint: "fixturefingerprint",
          persons: 100,
          households: 40,
        });
      }
      if (path === "/baseline") {
        return jsonResponse(200, {
          policy: "fixture",
          budget_brl_per_year: { disposable: 9.2e10 },
          poverty_line_brl: "406.00",
          headcount: { all: 0.204, children: 0.337, working_age: 0.175, elderly: 0.044 },
          gini: 0.5,
          population_fingerprint: "fixturefingerprint",
        });
      }
      if (path === "/simulate") {
        const { scheme } = JSON.parse(String(init?.body)) as { scheme: SchemeDoc };
        simulateCalls.push(scheme);
        const { status, body } = fixtureSimulate(scheme);
        return jsonResponse(status, body);
      }
      return jsonResponse(404, { detail: "not found" });
    }),
  );
}

function jsonResponse(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}

const settle = (ms: number) => new Promise((r) => setTimeout(r, ms));

async function mountFixtureApp(): Promise<App> {
  installFixtureFetch();
  document.body.innerHTML = `<main id="app"></main>`;
  const app = mountApp(
    document.getElementById("app") as HTMLElement,
    new ApiClient("http://fixture"),
  );
  await app.start();
  return app;
}

function setSlider(app: App, selector: string, value: number): void {
  const slider = app.input(selector);
  slider.value = String(value);
  slider.dispatchEvent(new Event("input", { bubbles: true }));
}

describe("what-if app against the fixture service", () => {
  beforeEach(() => {
    vi.useRealTimers();
  });
  afterEach(() => {
    vi.unstubAllGlobals();
  });

  it("renders the scheme2 preset amounts 203/406/812", async () => {
    const app = await mountFixtureApp();
    const buttons = Array.from(
      app.root.querySelectorAll<HTMLButtonElement>("button[data-preset]"),
    );
    expect(buttons.map((b) => b.dataset.preset)).toEqual(["scheme1", "scheme2", "scheme3"]);
    buttons[1]!.click();
    expect(app.input("#child").value).toBe("203.00");
    expect(app.input("#adult").value).toBe("406.00");
    expect(app.input("#elderly").value).toBe("812.00");
  });

  it("re-solves with a strictly larger rate when the adult slider rises", async () => {
    const app = await mountFixtureApp();
    app.applyPreset(PRESETS[1]!);
    await settle(DEBOUNCE_MS + 80);
    expect(app.lastOutcome?.kind).toBe("ok");
    const before =
      app.lastOutcome!.kind === "ok" ? app.lastOutcome!.response.solver.rate : NaN;
    const cardBefore = app.el("[data-field=solved-rate]").textContent;

    setSlider(app, "#adult-slider", 900);
    await settle(DEBOUNCE_MS + 80);
    expect(app.lastOutcome?.kind).toBe("ok");
    const after =
      app.lastOutcome!.kind === "ok" ? app.lastOutcome!.response.solver.rate : NaN;
    expect(after).toBeGreaterThan(before);
    const cardAfter = app.el("[data-field=solved-rate]").textContent;
    expect(cardAfter).not.toBe(cardBefore);
    expect(cardAfter).toContain(`${(100 * after).toFixed(1)}%`);
  });

  it("renders a 422 infeasibility diagnostic inline", async () => {
    const app = await mountFixtureApp();
    app.applyPreset(PRESETS[1]!);
    setSlider(app, "#adult-slider", 2400);
    await settle(DEBOUNCE_MS + 80);
    const banner = app.el("#banner [data-kind=infeasible]");
    expect(banner.textContent).toContain("cannot be financed");
    expect(banner.textContent).toContain("131.0%");
    expect(banner.textContent).toContain("shortfall");
  });

  it("issues at most one request per debounce window of slider movement", async () => {
    const app = await mountFixtureApp();
    app.applyPreset(PRESETS[0]!);
    await settle(DEBOUNCE_MS + 80);
    const before = simulateCalls.length;
    for (let v = 410; v < 460; v += 10) {
      setSlider(app, "#adult-slider", v);
      await settle(20); // five moves well inside one window
    }
    await settle(DEBOUNCE_MS + 80);
    expect(simulateCalls.length).toBe(before + 1);
    expect(simulateCalls.at(-1)?.ubi.adult).toBe("450.00");
  });

  it("blocks submission client-side when a rate is out of range", async () => {
    const app = await mountFixtureApp();
    app.applyPreset(PRESETS[0]!);
    await settle(DEBOUNCE_MS + 80);
    const before = simulateCalls.length;
    app.input("#solve-rate").checked = false;
    app.input("#solve-rate").dispatchEvent(new Event("change", { bubbles: true }));
    const rate = app.input("#flat-rate");
    rate.disabled = false;
    rate.value = "120";
    rate.dispatchEvent(new Event("input", { bubbles: true }));
    await settle(DEBOUNCE_MS + 80);
    expect(simulateCalls.length).toBe(before); // nothing sent
    expect(app.el("#form-errors").textContent).toContain("percentage in [0, 100)");
  });

  it("shows a retry banner and disables the form when the service is down", async () => {
    vi.stubGlobal(
      "fetch",
      vi.fn(async () => {
        throw new TypeError("fetch failed");
      }),
    );
    document.body.innerHTML = `<main id="app"></main>`;
    const app = mountApp(
      document.getElementById("app") as HTMLElement,
      new ApiClient("http://fixture"),
    );
    await app.start();
    expect(app.el("#banner").textContent).toContain("service unreachable");
    expect(app.input("#adult").disabled).toBe(true);
    expect(app.el<HTMLButtonElement>("#retry")).toBeTruthy();
  });
});
