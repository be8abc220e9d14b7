"""Chain bookkeeping faults."""

from __future__ import annotations

from quantum_core.errors import SimulationError


class UnknownSystem(SimulationError):
    """The system was never declared in the chain graph."""


class ChainConstraintViolation(SimulationError):
    """A mutation would break a structural constraint of the chain."""


class CycleRejected(ChainConstraintViolation):
    """The tick would close a directed cycle."""


class PrimeTargeted(ChainConstraintViolation):
    """Nothing value-determines a prime initiator."""


class TemporalOrderViolation(ChainConstraintViolation):
    """The event precedes an event already recorded."""


__all__ = [
    "ChainConstraintViolation",
    "CycleRejected",
    "PrimeTargeted",
    "TemporalOrderViolation",
    "UnknownSystem",
]
