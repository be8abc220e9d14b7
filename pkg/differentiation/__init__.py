"""Quantum-property triples, environment overlaps and interaction roles."""

from __future__ import annotations

from .coupling import PointerCoupling, bath_strengths
from .dynamics import Trajectory, TrajectoryPoint, is_complete, reverse, run_differentiation
from .errors import AmbiguousRole, IrreversibleContext, NotPointerDiagonal
from .measures import OverlapMatrix, coherence_overlaps, degree_of_differentiation, max_degree
from .models import InteractionRole, QuantumProperty, ValueProperty
from .roles import classify_mode_transfer, classify_role, populated_modes

__all__ = [
    "AmbiguousRole",
    "InteractionRole",
    "IrreversibleContext",
    "NotPointerDiagonal",
    "OverlapMatrix",
    "PointerCoupling",
    "QuantumProperty",
    "Trajectory",
    "TrajectoryPoint",
    "ValueProperty",
    "bath_strengths",
    "classify_mode_transfer",
    "classify_role",
    "coherence_overlaps",
    "degree_of_differentiation",
    "is_complete",
    "max_degree",
    "populated_modes",
    "reverse",
    "run_differentiation",
]
