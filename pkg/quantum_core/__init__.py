"""Dense density-matrix algebra over small labeled composite spaces."""

from __future__ import annotations

from .errors import (
    DegenerateObservable,
    DimensionCapExceeded,
    InvalidPartition,
    InvalidState,
    LabelClash,
    NumericalDegeneracy,
    SimulationError,
    SpaceMismatch,
)
from .models import DensityOperator, HilbertSpace, Observable, PureState, UnitaryEvolution
from .operations import (
    Branch,
    born_branches,
    born_probabilities,
    born_sample,
    embed,
    embed_unitary,
    evolve,
    expectation,
    fidelity,
    measure,
    measure_local,
    partial_trace,
    reorder,
    tensor,
    von_neumann_entropy,
)
from .rng import Stream, trial_rng

__all__ = [
    "Branch",
    "DegenerateObservable",
    "DensityOperator",
    "DimensionCapExceeded",
    "HilbertSpace",
    "InvalidPartition",
    "InvalidState",
    "LabelClash",
    "NumericalDegeneracy",
    "Observable",
    "PureState",
    "SimulationError",
    "SpaceMismatch",
    "Stream",
    "UnitaryEvolution",
    "born_branches",
    "born_probabilities",
    "born_sample",
    "embed",
    "embed_unitary",
    "evolve",
    "expectation",
    "fidelity",
    "measure",
    "measure_local",
    "partial_trace",
    "reorder",
    "tensor",
    "trial_rng",
    "von_neumann_entropy",
]
