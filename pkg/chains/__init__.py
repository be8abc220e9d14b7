"""Stable differentiation chains as timestamped DAGs."""

from __future__ import annotations

from .errors import (
    ChainConstraintViolation,
    CycleRejected,
    PrimeTargeted,
    TemporalOrderViolation,
    UnknownSystem,
)
from .export import ChainSnapshot, EdgeView, events_json, snapshot, to_dot
from .graph import (
    Gate,
    active_edges,
    determinacy_gate,
    isolate,
    lapse_time,
    membership,
    record_value_determination,
    reopen,
    sdc_members,
    structure,
)
from .models import (
    ChainEvent,
    ChainGraph,
    ChainNode,
    Isolation,
    Membership,
    RoleClass,
    StabilityParams,
    ValueDeterminationEdge,
)
from .validation import ValidationReport, Violation, validate

__all__ = [
    "ChainConstraintViolation",
    "ChainEvent",
    "ChainGraph",
    "ChainNode",
    "ChainSnapshot",
    "CycleRejected",
    "EdgeView",
    "Gate",
    "Isolation",
    "Membership",
    "PrimeTargeted",
    "RoleClass",
    "StabilityParams",
    "TemporalOrderViolation",
    "UnknownSystem",
    "ValidationReport",
    "ValueDeterminationEdge",
    "Violation",
    "active_edges",
    "determinacy_gate",
    "events_json",
    "isolate",
    "lapse_time",
    "membership",
    "record_value_determination",
    "reopen",
    "sdc_members",
    "snapshot",
    "structure",
    "to_dot",
    "validate",
]
