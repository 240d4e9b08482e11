/**
 * Scheme form state: the editable mirror of a scheme document, with
 * client-side validation matching the server's invariants (non-negative
 * amounts, rates in [0, 1), positive threshold/poverty line).
 */

import type { SchemeDoc } from "./types.js";

export interface SchemeForm {
  name: string;
  child: string;
  adult: string;
  elderly: string;
  pensionsReducedByUbi: boolean;
  otherBenefitsAbolished: boolean;
  taxType: "flat" | "two_bracket";
  solveRate: boolean;
  flatRatePct: string;
  lowerRatePct: string;
  thresholdBrl: string; // blank = derive from the data
  povertyLineBrl: string;
  ubiTaxable: boolean;
}

export interface FieldError {
  field: keyof SchemeForm;
  message: string;
}

export const DEFAULT_FORM: SchemeForm = {
  name: "custom",
  child: "406.00",
  adult: "406.00",
  elderly: "406.00",
  pensionsReducedByUbi: true,
  otherBenefitsAbolished: true,
  taxType: "flat",
  solveRate: true,
  flatRatePct: "35.0",
  lowerRatePct: "20.0",
  thresholdBrl: "",
  povertyLineBrl: "406.00",
  ubiTaxable: false,
};

const MONEY_RE = /^\d+(\.\d{1,2})?$/;

function moneyError(value: string, field: keyof SchemeForm, label: string): FieldError | null {
  if (!MONEY_RE.test(value.trim())) {
    return { field, message: `${label} must be a non-negative amount like 406.00` };
  }
  return null;
}

function rateError(pct: string, field: keyof SchemeForm, label: string): FieldError | null {
  const value = Number(pct);
  if (!Number.isFinite(value) || value < 0 || value >= 100) {
    return { field, message: `${label} must be a percentage in [0, 100)` };
  }
  return null;
}

export function validate(form: SchemeForm): FieldError[] {
  const errors: FieldError[] = [];
  const push = (e: FieldError | null) => {
    if (e) errors.push(e);
  };
  push(moneyError(form.child, "child", "child amount"));
  push(moneyError(form.adult, "adult", "adult amount"));
  push(moneyError(form.elderly, "elderly", "elderly amount"));
  push(moneyError(form.povertyLineBrl, "povertyLineBrl", "poverty line"));
  if (Number(form.povertyLineBrl) <= 0) {
    errors.push({ field: "povertyLineBrl", message: "poverty line must be positive" });
  }
  if (form.taxType === "flat") {
    if (!form.solveRate) push(rateError(form.flatRatePct, "flatRatePct", "flat rate"));
  } else {
    push(rateError(form.lowerRatePct, "lowerRatePct", "reduced rate"));
    if (!form.solveRate) push(rateError(form.flatRatePct, "flatRatePct", "upper rate"));
    if (form.thresholdBrl.trim() !== "") {
      push(moneyError(form.thresholdBrl, "thresholdBrl", "threshold"));
      if (Number(form.thresholdBrl) <= 0) {
        errors.push({ field: "thresholdBrl", message: "threshold must be positive" });
      }
    }
  }
  return errors;
}

function asMoney(value: string): string {
  return Number(value).toFixed(2);
}

/** Build the request document; call only after validate() returns []. */
export function toSchemeDoc(form: SchemeForm): SchemeDoc {
  const tax =
    form.taxType === "flat"
      ? {
          type: "flat" as const,
          rate: form.solveRate ? ("solve" as const) : Number(form.flatRatePct) / 100,
        }
      : {
          type: "two_bracket" as const,
          lower_rate: Number(form.lowerRatePct) / 100,
          threshold: form.thresholdBrl.trim() === "" ? null : asMoney(form.thresholdBrl),
          upper_rate: form.solveRate ? ("solve" as const) : Number(form.flatRatePct) / 100,
        };
  return {
    name: form.name,
    ubi: {
      child: asMoney(form.child),
      adult: asMoney(form.adult),
      elderly: asMoney(form.elderly),
      child_max_age: 17,
      elderly_min_age: 65,
    },
    offsets: {
      pensions_reduced_by_ubi: form.pensionsReducedByUbi,
      other_benefits_abolished: form.otherBenefitsAbolished,
    },
    tax,
    ubi_taxable: form.ubiTaxable,
    poverty_line: asMoney(form.povertyLineBrl),
  };
}

/** Populate the form from a preset document (inverse of toSchemeDoc). */
export function fromSchemeDoc(doc: SchemeDoc): SchemeForm {
  const base: SchemeForm = {
    ...DEFAULT_FORM,
    name: doc.name,
    child: doc.ubi.child,
    adult: doc.ubi.adult,
    elderly: doc.ubi.elderly,
    pensionsReducedByUbi: doc.offsets.pensions_reduced_by_ubi,
    otherBenefitsAbolished: doc.offsets.other_benefits_abolished,
    ubiTaxable: doc.ubi_taxable,
    povertyLineBrl: doc.poverty_line,
  };
  if (doc.tax.type === "flat") {
    base.taxType = "flat";
    base.solveRate = doc.tax.rate === "solve";
    if (doc.tax.rate !== "solve") base.flatRatePct = (doc.tax.rate * 100).toFixed(1);
  } else {
    base.taxType = "two_bracket";
    base.lowerRatePct = (doc.tax.lower_rate * 100).toFixed(1);
    base.thresholdBrl = doc.tax.threshold ?? "";
    base.solveRate = doc.tax.upper_rate === "solve";
    if (doc.tax.upper_rate !== "solve") {
      base.flatRatePct = (doc.tax.upper_rate * 100).toFixed(1);
    }
  }
  return base;
}
