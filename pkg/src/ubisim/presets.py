"""Shipped scheme presets and baseline policy configs, plus JSON (de)serializers.

Monetary fields in config documents are decimal BRL strings (parsed exactly
to centavos); rates are fractions in [0, 1) or the string "solve"; a null
two-bracket threshold means "derive from the loaded data" (twice the
weighted median per-capita household gross income).
"""

from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .baseline import FROM_COLUMNS, FROM_SCHEDULES, BaselinePolicy, BracketSchedule
from .errors import InvalidSpec
from .microdata import SynthSpec
from .money import Money, parse_brl
from .reform import FlatTax, OffsetRule, SchemeSpec, TwoBracketTax, UbiSchedule

PRESET_NAMES = ("scheme1", "scheme2", "scheme3")
DEFAULT_BASELINE_CONFIG = "baseline_2017_example"


def _money(value, field: str) -> Money:
    if isinstance(value, str):
        return parse_brl(value)
    if isinstance(value, int):
        return value * 100
    if isinstance(value, float):
        return round(value * 100)
    raise InvalidSpec(f"{field}: expected decimal BRL string or number, got {value!r}")


def _rate(value, field: str) -> float | None:
    if value == "solve" or value is None:
        return None
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise InvalidSpec(f"{field}: expected a fraction in [0, 1) or \"solve\", got {value!r}")


def scheme_from_dict(doc: dict) -> SchemeSpec:
    try:
        ubi_doc = doc["ubi"]
        tax_doc = doc["tax"]
    except KeyError as exc:
        raise InvalidSpec(f"scheme document missing section {exc}") from exc

    ubi = UbiSchedule(
        child_amount=_money(ubi_doc["child"], "ubi.child"),
        adult_amount=_money(ubi_doc["adult"], "ubi.adult"),
        elderly_amount=_money(ubi_doc["elderly"], "ubi.elderly"),
        child_max_age=int(ubi_doc.get("child_max_age", 17)),
        elderly_min_age=int(ubi_doc.get("elderly_min_age", 65)),
    )
    kind = tax_doc.get("type")
    if kind == "flat":
        tax = FlatTax(rate=_rate(tax_doc.get("rate", "solve"), "tax.rate"))
    elif kind == "two_bracket":
        lower = _rate(tax_doc.get("lower_rate"), "tax.lower_rate")
        if lower is None:
            raise InvalidSpec("tax.lower_rate must be a concrete rate, not \"solve\"")
        threshold = tax_doc.get("threshold")
        tax = TwoBracketTax(
            lower_rate=lower,
            threshold=_money(threshold, "tax.threshold") if threshold is not None else None,
            upper_rate=_rate(tax_doc.get("upper_rate", "solve"), "tax.upper_rate"),
        )
    else:
        raise InvalidSpec(f"tax.type must be \"flat\" or \"two_bracket\", got {kind!r}")

    offsets = doc.get("offsets", {})
    return SchemeSpec(
        name=str(doc.get("name", "custom")),
        ubi=ubi,
        tax=tax,
        offset=OffsetRule(
            pensions_reduced_by_ubi=bool(offsets.get("pensions_reduced_by_ubi", True)),
            other_benefits_abolished=bool(offsets.get("other_benefits_abolished", True)),
        ),
        ubi_taxable=bool(doc.get("ubi_taxable", False)),
        poverty_line=_money(doc.get("poverty_line", "406.00"), "poverty_line"),
    )


def _schedule_from_dict(doc: dict, field: str) -> BracketSchedule:
    try:
        brackets = tuple(
            (_money(lower, f"{field}.brackets.lower"), float(rate))
            for lower, rate in doc["brackets"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidSpec(f"{field}: malformed bracket list") from exc
    cap = doc.get("cap")
    return BracketSchedule(
        brackets=brackets, cap=_money(cap, f"{field}.cap") if cap is not None else None
    )


def baseline_from_dict(doc: dict) -> BaselinePolicy:
    source = doc.get("tax_source", FROM_SCHEDULES)
    if source not in (FROM_COLUMNS, FROM_SCHEDULES):
        raise InvalidSpec(f"tax_source must be {FROM_COLUMNS!r} or {FROM_SCHEDULES!r}")
    return BaselinePolicy(
        pit=_schedule_from_dict(doc["pit"], "pit"),
        ssc=_schedule_from_dict(doc["ssc"], "ssc"),
        tax_source=source,
        name=str(doc.get("name", "baseline")),
    )


def _read_packaged(name: str) -> dict:
    ref = resources.files("ubisim").joinpath(f"config/{name}.json")
    return json.loads(ref.read_text(encoding="utf-8"))


def load_scheme(name_or_path: str) -> SchemeSpec:
    """Resolve a preset name (scheme1/scheme2/scheme3) or a JSON file path."""
    if name_or_path in PRESET_NAMES:
        return scheme_from_dict(_read_packaged(name_or_path))
    path = Path(name_or_path)
    if not path.exists():
        raise InvalidSpec(
            f"{name_or_path!r} is neither a preset ({', '.join(PRESET_NAMES)}) nor a file"
        )
    return scheme_from_dict(json.loads(path.read_text(encoding="utf-8")))


def load_baseline_policy(path: str | None = None) -> BaselinePolicy:
    """Load a baseline policy config; default is the shipped illustrative one."""
    if path is None:
        return baseline_from_dict(_read_packaged(DEFAULT_BASELINE_CONFIG))
    return baseline_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def preset_schemes() -> list[SchemeSpec]:
    return [load_scheme(name) for name in PRESET_NAMES]


_SYNTH_MONEY_FIELDS = (
    "median_market_income",
    "median_pension",
    "min_pension",
    "benefit_income_cutoff",
    "median_benefit",
    "benefit_per_child",
)


def synth_spec_from_dict(doc: dict, **overrides) -> SynthSpec:
    """Build a SynthSpec from a JSON document; money fields are decimal BRL."""
    kwargs = dict(doc)
    kwargs.update({k: v for k, v in overrides.items() if v is not None})
    for field in _SYNTH_MONEY_FIELDS:
        if field in kwargs:
            kwargs[field] = _money(kwargs[field], field)
    for field in ("age_mix", "household_size_probs"):
        if field in kwargs:
            kwargs[field] = tuple(kwargs[field])
    try:
        spec = SynthSpec(**kwargs)
    except TypeError as exc:
        raise InvalidSpec(f"bad synthesis spec: {exc}") from exc
    spec.validate()
    return spec


def load_synth_spec(path: str | None, **overrides) -> SynthSpec:
    doc = {} if path is None else json.loads(Path(path).read_text(encoding="utf-8"))
    return synth_spec_from_dict(doc, **overrides)
