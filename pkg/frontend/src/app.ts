/**
 * What-if controller: binds the scheme form to the simulation service.
 *
 * The view is a pure function of (form, last outcome): every edit validates
 * client-side, then a debounced simulate (at most one request per 300 ms,
 * superseded requests aborted) refreshes the result panel from the server's
 * numbers alone.
 */

import { ApiClient } from "./api.js";
import { debounce } from "./debounce.js";
import {
  DEFAULT_FORM,
  SchemeForm,
  fromSchemeDoc,
  toSchemeDoc,
  validate,
} from "./form.js";
import type { SchemeDoc, SimulateOutcome } from "./types.js";
import {
  renderBaselinePanel,
  renderBudgetTable,
  renderDecileChart,
  renderDecileTable,
  renderError,
  renderHeadlineCards,
  renderInfeasible,
} from "./view.js";

export const DEBOUNCE_MS = 300;

type BoolField = {
  [K in keyof SchemeForm]: SchemeForm[K] extends boolean ? K : never;
}[keyof SchemeForm];
type TextField = {
  [K in keyof SchemeForm]: SchemeForm[K] extends string
    ? string extends SchemeForm[K]
      ? K
      : never
    : never;
}[keyof SchemeForm];

const FORM_HTML = `
<section class="panel" id="scheme-panel">
  <h2>Scheme</h2>
  <div id="presets" class="presets"><span class="hint">loading presets…</span></div>
  <div class="field-group" id="ubi-fields">
    <h3>Monthly basic income (BRL)</h3>
    <label>child (&lt;18)
      <input type="range" id="child-slider" min="0" max="2500" step="1">
      <input type="number" id="child" min="0" step="0.01">
    </label>
    <label>adult (18–64)
      <input type="range" id="adult-slider" min="0" max="2500" step="1">
      <input type="number" id="adult" min="0" step="0.01">
    </label>
    <label>elderly (65+)
      <input type="range" id="elderly-slider" min="0" max="2500" step="1">
      <input type="number" id="elderly" min="0" step="0.01">
    </label>
  </div>
  <div class="field-group">
    <h3>Offsets</h3>
    <label><input type="checkbox" id="offset-pensions"> reduce pensions by own UBI</label>
    <label><input type="checkbox" id="offset-others"> replace other cash benefits</label>
    <label><input type="checkbox" id="ubi-taxable"> UBI counts as taxable income</label>
  </div>
  <div class="field-group">
    <h3>Tax design</h3>
    <label><input type="radio" name="tax-type" id="tax-flat" value="flat"> flat</label>
    <label><input type="radio" name="tax-type" id="tax-two" value="two_bracket"> two-bracket</label>
    <label><input type="checkbox" id="solve-rate"> solve budget-neutral rate</label>
    <label>rate (%) <input type="number" id="flat-rate" min="0" max="99.9" step="0.1"></label>
    <span id="two-bracket-fields">
      <label>reduced rate (%) <input type="number" id="lower-rate" min="0" max="99.9" step="0.1"></label>
      <label>threshold (BRL/month) <input type="text" id="threshold" placeholder="derive from data"></label>
    </span>
  </div>
  <div class="field-group">
    <label>poverty line (BRL/month) <input type="number" id="poverty-line" min="0.01" step="0.01"></label>
  </div>
  <div id="form-errors" class="errors"></div>
</section>
<section class="panel" id="results-panel">
  <h2>Results</h2>
  <div id="baseline-panel"></div>
  <div id="banner"></div>
  <div id="cards" class="cards"></div>
  <div id="chart"></div>
  <div id="tables"></div>
</section>
`;

export class App {
  form: SchemeForm = { ...DEFAULT_FORM };
  lastOutcome: SimulateOutcome | null = null;
  private readonly scheduleSimulate: { (): void; cancel(): void };

  constructor(
    readonly root: HTMLElement,
    readonly client: ApiClient,
  ) {
    root.innerHTML = FORM_HTML;
    this.scheduleSimulate = debounce(() => void this.simulateNow(), DEBOUNCE_MS);
    this.bindInputs();
  }

  /** Fetch presets and baseline; a dead service disables the form. */
  async start(): Promise<void> {
    try {
      const [presets, baseline] = await Promise.all([
        this.client.presets(),
        this.client.baseline(),
      ]);
      this.renderPresets(presets.presets);
      this.el("#baseline-panel").innerHTML = renderBaselinePanel(baseline);
    } catch (err) {
      this.el("#presets").innerHTML = "";
      this.el("#banner").innerHTML =
        renderError("network", `cannot reach the simulation service: ${err}`) +
        `<button id="retry">retry</button>`;
      this.setFormDisabled(true);
      this.el("#retry").addEventListener("click", () => {
        this.setFormDisabled(false);
        this.el("#banner").innerHTML = "";
        void this.start();
      });
    }
  }

  el<T extends HTMLElement = HTMLElement>(selector: string): T {
    const node = this.root.querySelector<T>(selector);
    if (!node) throw new Error(`missing element ${selector}`);
    return node;
  }

  input(selector: string): HTMLInputElement {
    return this.el<HTMLInputElement>(selector);
  }

  private renderPresets(presets: SchemeDoc[]): void {
    const host = this.el("#presets");
    host.innerHTML = presets
      .map(
        (p) =>
          `<button type="button" data-preset="${p.name}">${p.name}</button>`,
      )
      .join(" ");
    host.querySelectorAll<HTMLButtonElement>("button[data-preset]").forEach((btn) => {
      const doc = presets.find((p) => p.name === btn.dataset.preset)!;
      btn.addEventListener("click", () => this.applyPreset(doc));
    });
  }

  applyPreset(doc: SchemeDoc): void {
    this.form = fromSchemeDoc(doc);
    this.syncFormToDom();
    this.scheduleSimulate();
  }

  private setFormDisabled(disabled: boolean): void {
    this.root
      .querySelectorAll<HTMLInputElement>("#scheme-panel input, #scheme-panel button")
      .forEach((node) => (node.disabled = disabled));
  }

  private bindInputs(): void {
    const moneyPair = (slider: string, box: string, field: "child" | "adult" | "elderly") => {
      this.input(slider).addEventListener("input", () => {
        this.form[field] = this.input(slider).value;
        this.input(box).value = this.input(slider).value;
        this.onEdit();
      });
      this.input(box).addEventListener("input", () => {
        this.form[field] = this.input(box).value;
        this.input(slider).value = String(Math.round(Number(this.input(box).value) || 0));
        this.onEdit();
      });
    };
    moneyPair("#child-slider", "#child", "child");
    moneyPair("#adult-slider", "#adult", "adult");
    moneyPair("#elderly-slider", "#elderly", "elderly");

    const check = (sel: string, field: BoolField) =>
      this.input(sel).addEventListener("change", () => {
        this.form[field] = this.input(sel).checked;
        this.onEdit();
      });
    check("#offset-pensions", "pensionsReducedByUbi");
    check("#offset-others", "otherBenefitsAbolished");
    check("#ubi-taxable", "ubiTaxable");
    check("#solve-rate", "solveRate");

    for (const sel of ["#tax-flat", "#tax-two"]) {
      this.input(sel).addEventListener("change", () => {
        this.form.taxType = this.input("#tax-two").checked ? "two_bracket" : "flat";
        this.syncTaxVisibility();
        this.onEdit();
      });
    }

    const text = (sel: string, field: TextField) =>
      this.input(sel).addEventListener("input", () => {
        this.form[field] = this.input(sel).value;
        this.onEdit();
      });
    text("#flat-rate", "flatRatePct");
    text("#lower-rate", "lowerRatePct");
    text("#threshold", "thresholdBrl");
    text("#poverty-line", "povertyLineBrl");

    this.syncFormToDom();
  }

  syncFormToDom(): void {
    const f = this.form;
    this.input("#child").value = f.child;
    this.input("#adult").value = f.adult;
    this.input("#elderly").value = f.elderly;
    this.input("#child-slider").value = String(Math.round(Number(f.child) || 0));
    this.input("#adult-slider").value = String(Math.round(Number(f.adult) || 0));
    this.input("#elderly-slider").value = String(Math.round(Number(f.elderly) || 0));
    this.input("#offset-pensions").checked = f.pensionsReducedByUbi;
    this.input("#offset-others").checked = f.otherBenefitsAbolished;
    this.input("#ubi-taxable").checked = f.ubiTaxable;
    this.input("#solve-rate").checked = f.solveRate;
    this.input("#tax-flat").checked = f.taxType === "flat";
    this.input("#tax-two").checked = f.taxType === "two_bracket";
    this.input("#flat-rate").value = f.flatRatePct;
    this.input("#lower-rate").value = f.lowerRatePct;
    this.input("#threshold").value = f.thresholdBrl;
    this.input("#poverty-line").value = f.povertyLineBrl;
    this.syncTaxVisibility();
    this.renderFormErrors();
  }

  private syncTaxVisibility(): void {
    this.el("#two-bracket-fields").style.display =
      this.form.taxType === "two_bracket" ? "" : "none";
    this.input("#flat-rate").disabled = this.form.solveRate;
  }

  /** Validate; only a valid form reaches the service. */
  private onEdit(): void {
    if (this.renderFormErrors()) {
      this.scheduleSimulate();
    } else {
      this.scheduleSimulate.cancel();
    }
  }

  /** True when the form is valid. */
  private renderFormErrors(): boolean {
    const errors = validate(this.form);
    this.el("#form-errors").innerHTML = errors
      .map((e) => `<div class="field-error" data-field="${e.field}">${e.message}</div>`)
      .join("");
    return errors.length === 0;
  }

  /** Immediate request, bypassing the debounce (used on preset clicks too). */
  async simulateNow(): Promise<void> {
    const errors = validate(this.form);
    if (errors.length > 0) return;
    const outcome = await this.client.simulate(toSchemeDoc(this.form));
    if (outcome === null) return; // superseded by a newer request
    this.lastOutcome = outcome;
    this.renderOutcome(outcome);
  }

  private renderOutcome(outcome: SimulateOutcome): void {
    const banner = this.el("#banner");
    if (outcome.kind === "ok") {
      banner.innerHTML = "";
      const r = outcome.response;
      this.el("#cards").innerHTML = renderHeadlineCards(r);
      this.el("#chart").innerHTML = renderDecileChart(r.figure_series, r.deciles);
      this.el("#tables").innerHTML =
        renderBudgetTable(r.budget_brl_per_year) + renderDecileTable(r.deciles);
      return;
    }
    if (outcome.kind === "infeasible") {
      banner.innerHTML = renderInfeasible(
        outcome.detail.message,
        outcome.detail.shortfall_brl_per_year,
      );
      return;
    }
    if (outcome.kind === "rejected") {
      banner.innerHTML = renderError(outcome.status, outcome.message);
      return;
    }
    banner.innerHTML = renderError("network", outcome.message);
  }
}

export function mountApp(root: HTMLElement, client: ApiClient): App {
  return new App(root, client);
}
