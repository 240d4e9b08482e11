"""Exception hierarchy shared across the simulation engine."""

from __future__ import annotations


class SimulationError(Exception):
    """Base class for all engine-level failures."""


class IngestionError(SimulationError):
    """Invalid microdata; `row` is the 1-based data row (header excluded)."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class MissingColumn(IngestionError):
    pass


class NegativeIncome(IngestionError):
    pass


class NonPositiveWeight(IngestionError):
    pass


class UnequalWeightsWithinHousehold(IngestionError):
    pass


class DuplicatePersonId(IngestionError):
    pass


class InvalidSpec(SimulationError):
    """A synthesis or scheme document violates its invariants."""


class EmptyInput(SimulationError):
    pass


class MissingBaselineTaxColumns(SimulationError):
    pass


class UnsolvedRate(SimulationError):
    """A scheme with 'solve' markers was applied without solving first."""


class SolverError(SimulationError):
    pass


class InfeasibleNeutrality(SolverError):
    """Budget neutrality needs a rate >= 100%; carries the annual shortfall."""

    def __init__(self, message: str, shortfall_cents_per_year: float = 0.0):
        self.shortfall_cents_per_year = shortfall_cents_per_year
        super().__init__(message)


class ZeroBase(SolverError):
    pass


class EmptyUpperBracket(SolverError):
    pass


class NotBracketed(SolverError):
    pass


class AllZeroIncomes(SimulationError):
    pass


class InconsistentInputs(SimulationError):
    """Report inputs come from different populations or schemes."""


class IoFailure(SimulationError):
    pass
