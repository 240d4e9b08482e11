"""Integer-centavo monetary arithmetic.

All monetary stocks are stored as signed integer centavos (BRL), monthly
period unless stated otherwise. Aggregate accounting uses exact rational
arithmetic (`fractions.Fraction`) so that budget identities reconcile
exactly before any display rounding. The single rounding step applied to
derived amounts is round-half-up to the centavo.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction

import numpy as np

# Money values are plain ints: centavos of BRL per month unless stated.
Money = int

CENTS = 100
MONTHS_PER_YEAR = 12

# Survey weights are quantized to six decimals at ingestion; weighted sums
# over integer centavos are then exact integers at this scale.
WEIGHT_SCALE = 10**6

_MONEY_RE = re.compile(r"^(-?)(\d+)(?:\.(\d{1,2}))?$")
_WEIGHT_RE = re.compile(r"^(\d+)(?:\.(\d+))?$")


def parse_brl(text: str) -> Money:
    """Parse decimal BRL text (at most 2 fraction digits) exactly to centavos."""
    m = _MONEY_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a valid BRL amount: {text!r}")
    sign, whole, frac = m.groups()
    cents = int(whole) * CENTS + int((frac or "").ljust(2, "0") or 0)
    return -cents if sign else cents


def format_brl(cents: Money) -> str:
    """Render centavos as decimal BRL text, the inverse of parse_brl."""
    sign = "-" if cents < 0 else ""
    cents = abs(int(cents))
    return f"{sign}{cents // CENTS}.{cents % CENTS:02d}"


def parse_weight(text: str) -> int:
    """Parse a positive decimal expansion factor to an integer at WEIGHT_SCALE.

    Fraction digits beyond six are rounded half-up (documented ingestion
    quantization); the quantized value is the weight from then on.
    """
    m = _WEIGHT_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a valid weight: {text!r}")
    whole, frac = m.groups()
    frac = frac or ""
    scaled = int(whole) * WEIGHT_SCALE + int(frac[:6].ljust(6, "0") or 0)
    if len(frac) > 6 and frac[6] >= "5":
        scaled += 1
    return scaled


def format_weight(scaled: int) -> str:
    """Render a WEIGHT_SCALE-scaled weight as decimal text without spurious zeros."""
    whole, frac = divmod(int(scaled), WEIGHT_SCALE)
    if frac == 0:
        return str(whole)
    return f"{whole}.{frac:06d}".rstrip("0")


def round_half_up(x: float) -> int:
    """Round a float to the nearest integer, ties away from zero toward +inf."""
    return math.floor(x + 0.5)


def round_half_up_div(num: int, den: int) -> int:
    """Exact round-half-up of num/den for integer num >= 0, den > 0."""
    if num < 0 or den <= 0:
        raise ValueError("round_half_up_div expects num >= 0, den > 0")
    return (2 * num + den) // (2 * den)


def round_half_up_array(x: np.ndarray) -> np.ndarray:
    """Vectorized round-half-up of a float array to int64 centavos."""
    return np.floor(x + 0.5).astype(np.int64)


def exact_weighted_sum(weights_scaled: np.ndarray, values: np.ndarray) -> int:
    """Exact integer dot product of scaled weights and centavo values.

    Falls back to arbitrary-precision Python integers when the int64
    accumulator could overflow (nationwide annual totals exceed 10^15
    centavos, and the weight scale adds six more digits).
    """
    if len(values) == 0:
        return 0
    bound = (
        int(np.abs(weights_scaled).max(initial=0))
        * int(np.abs(values).max(initial=0))
        * len(values)
    )
    if bound < 2**62:
        return int(np.dot(weights_scaled.astype(np.int64), values.astype(np.int64)))
    return sum(int(w) * int(v) for w, v in zip(weights_scaled.tolist(), values.tolist()))


def weighted_total(weights_scaled: np.ndarray, values: np.ndarray) -> Fraction:
    """Exact weighted sum of monthly centavo values, as a Fraction of centavos."""
    return Fraction(exact_weighted_sum(weights_scaled, values), WEIGHT_SCALE)


def annualize(monthly_total: Fraction) -> Fraction:
    """Monthly aggregate -> annual aggregate (reports are per year)."""
    return monthly_total * MONTHS_PER_YEAR


def to_billions(annual_cents: Fraction | float) -> float:
    """Annual centavos -> billions of BRL per year (full precision float)."""
    return float(annual_cents) / CENTS / 1e9
