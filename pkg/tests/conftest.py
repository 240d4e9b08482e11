import numpy as np
import pytest

from ubisim.microdata import Population, PersonRecord, SynthSpec, synth_generate
from ubisim.presets import load_scheme


@pytest.fixture(scope="session")
def small_population() -> Population:
    return synth_generate(SynthSpec(n_households=300, seed=11))


@pytest.fixture(scope="session")
def medium_population() -> Population:
    return synth_generate(SynthSpec(n_households=2000, seed=7))


@pytest.fixture(scope="session")
def scheme1():
    return load_scheme("scheme1")


@pytest.fixture(scope="session")
def scheme2():
    return load_scheme("scheme2")


@pytest.fixture(scope="session")
def scheme3():
    return load_scheme("scheme3")


def person(
    pid="p1",
    hid="h1",
    age=30,
    weight=1.0,
    market=0,
    pension=0,
    other=0,
    pit=None,
    ssc=None,
) -> PersonRecord:
    return PersonRecord(
        person_id=pid,
        household_id=hid,
        age=age,
        weight=weight,
        market_income=market,
        pension_income=pension,
        other_benefit_income=other,
        baseline_pit=pit,
        baseline_ssc=ssc,
    )


def gini_pairwise(values, weights) -> float:
    """O(n^2) definition: sum of weighted absolute differences over 2*W^2*mean.

    Independent oracle for the sorted-pass implementation; kept quadratic on
    purpose.
    """
    x = np.asarray(values, dtype=np.float64)
    w = np.asarray(weights, dtype=np.float64)
    diff = np.abs(x[:, None] - x[None, :])
    num = float(w @ diff @ w)
    total_w = w.sum()
    mean = float((w * x).sum() / total_w)
    return num / (2.0 * total_w**2 * mean)
