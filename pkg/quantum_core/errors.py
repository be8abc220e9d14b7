"""Exception hierarchy shared by every simulator package."""

from __future__ import annotations


class SimulationError(Exception):
    """Base class for all simulator faults."""


class LabelClash(SimulationError):
    """Two subsystems with the same label were combined."""


class InvalidPartition(SimulationError):
    """A partial trace was asked to keep nothing or everything."""


class SpaceMismatch(SimulationError):
    """Operands live on different Hilbert spaces."""


class NumericalDegeneracy(SimulationError):
    """Every outcome probability vanished below the sampling floor."""


class DegenerateObservable(SimulationError):
    """An observable with repeated eigenvalues was supplied."""


class InvalidState(SimulationError):
    """A carrier violates its normalization, hermiticity or positivity."""


class DimensionCapExceeded(SimulationError):
    """A composite space grew beyond the configured dimension cap."""


__all__ = [
    "DegenerateObservable",
    "DimensionCapExceeded",
    "InvalidPartition",
    "InvalidState",
    "LabelClash",
    "NumericalDegeneracy",
    "SimulationError",
    "SpaceMismatch",
]
