"""Quantum causal models: Choi matrices, process operators and the Bell scenario."""

from __future__ import annotations

from .bell import (
    OUTCOMES,
    ProbabilityTable,
    bell_nodes,
    bell_process,
    chsh,
    correlation,
    direct_table,
    qcm_table,
    shared_state,
    spin_family,
)
from .choi import (
    ChoiMatrix,
    apply_choi,
    choi_of_classical,
    choi_of_kraus,
    choi_of_unitary,
    dephasing,
    no_influence,
    state_factor,
    trace_out,
)
from .classical import ClassicalModel, ConditionalTable, classical_limit
from .errors import IncompleteInterventionSet, InvalidProcess, NotDiagonal
from .process import (
    InterventionMap,
    ProcessNode,
    ProcessOperator,
    QmcReport,
    check_qmc,
    instrument_is_complete,
    intervention_operator,
    normalization,
    process_to_json,
    qcm_born,
)

__all__ = [
    "OUTCOMES",
    "ChoiMatrix",
    "ClassicalModel",
    "ConditionalTable",
    "IncompleteInterventionSet",
    "InterventionMap",
    "InvalidProcess",
    "NotDiagonal",
    "ProbabilityTable",
    "ProcessNode",
    "ProcessOperator",
    "QmcReport",
    "apply_choi",
    "bell_nodes",
    "bell_process",
    "check_qmc",
    "choi_of_classical",
    "choi_of_kraus",
    "choi_of_unitary",
    "chsh",
    "classical_limit",
    "correlation",
    "dephasing",
    "direct_table",
    "instrument_is_complete",
    "intervention_operator",
    "no_influence",
    "normalization",
    "process_to_json",
    "qcm_born",
    "qcm_table",
    "shared_state",
    "spin_family",
    "state_factor",
    "trace_out",
]
