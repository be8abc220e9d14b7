"""Process operators over DAGs, interventions and the QCM Born rule.

Each node ``A`` owns an input space ``A_in`` and, unless terminal, an output
space ``A_out``. The factor of ``A`` is the Choi matrix of the channel from its
parents' outputs to ``A_in`` (a plain state for root nodes). An intervention
is the transposed Choi matrix of the node's instrument element on
``A_out (x) A_in``, so that ``P = Tr[sigma * prod_A tau_A]``.
"""

from __future__ import annotations

import itertools
import logging
from collections.abc import Hashable, Mapping, Sequence
from dataclasses import dataclass, field
from typing import Any, Literal

import networkx as nx
import numpy as np
from pydantic import BaseModel, Field

from quantum_core.codec import complex_pairs
from quantum_core.errors import SpaceMismatch
from quantum_core.models import NORM_TOL, HilbertSpace
from quantum_core.operations import embed

from .choi import ChoiMatrix, choi_of_kraus
from .errors import IncompleteInterventionSet, InvalidProcess

logger = logging.getLogger(__name__)

COMMUTATOR_TOL = 1e-8


@dataclass(frozen=True)
class ProcessNode:
    name: str
    in_space: HilbertSpace
    out_space: HilbertSpace | None = None
    parents: tuple[str, ...] = ()
    # Interpretive chain annotation; no numerical effect.
    tag: Literal["SDC", "UDC"] | None = None

    @property
    def space(self) -> HilbertSpace:
        """``out (x) in``, the space interventions act on."""
        if self.out_space is None:
            return self.in_space
        return self.out_space.concat(self.in_space)


@dataclass(frozen=True, eq=False)
class InterventionMap:
    node: str
    setting: Hashable
    outcome: Hashable
    tau: np.ndarray
    space: HilbertSpace

    def __post_init__(self) -> None:
        tau = np.array(self.tau, dtype=complex)
        if tau.shape != (self.space.total_dim, self.space.total_dim):
            raise SpaceMismatch(f"Intervention on {self.node} has shape {tau.shape}.")
        tau.setflags(write=False)
        object.__setattr__(self, "tau", tau)

    @classmethod
    def from_povm_element(
        cls, node: ProcessNode, element: np.ndarray, setting: Hashable, outcome: Hashable
    ) -> InterventionMap:
        """Measure-and-discard on a terminal node: ``tau`` is the POVM element itself."""
        if node.out_space is not None:
            raise InvalidProcess(f"Node {node.name} has outputs; use an instrument.")
        return cls(node.name, setting, outcome, np.asarray(element, dtype=complex), node.in_space)

    @classmethod
    def from_kraus(
        cls, node: ProcessNode, kraus: Sequence[np.ndarray], setting: Hashable, outcome: Hashable
    ) -> InterventionMap:
        if node.out_space is None:
            raise InvalidProcess(f"Node {node.name} is terminal; use a POVM element.")
        choi = choi_of_kraus(kraus, node.in_space, node.out_space)
        return cls(node.name, setting, outcome, choi.matrix.T, node.space)

    @classmethod
    def identity(cls, node: ProcessNode, setting: Hashable = "pass", outcome: Hashable = "pass") -> InterventionMap:
        """Pass-through ``|Phi><Phi|`` from ``in`` to ``out``."""
        if node.out_space is None or node.out_space.dims != node.in_space.dims:
            raise InvalidProcess(f"Node {node.name} cannot pass its input through.")
        vector = np.eye(node.in_space.total_dim, dtype=complex).reshape(-1)
        return cls(node.name, setting, outcome, np.outer(vector, vector), node.space)


def instrument_is_complete(family: Sequence[InterventionMap], node: ProcessNode, atol: float = NORM_TOL) -> bool:
    """Outcomes of one setting sum to a trace-preserving instrument."""
    total = sum((item.tau for item in family), np.zeros_like(family[0].tau))
    if node.out_space is None:
        return bool(np.allclose(total, np.eye(node.in_space.total_dim), atol=atol, rtol=0.0))
    choi = ChoiMatrix(node.out_space, node.in_space, total.T)
    return choi.is_trace_preserving(atol)


@dataclass(frozen=True, eq=False)
class ProcessOperator:
    nodes: tuple[ProcessNode, ...]
    factors: Mapping[str, ChoiMatrix]
    space: HilbertSpace = field(init=False)

    def __post_init__(self) -> None:
        names = [node.name for node in self.nodes]
        if len(set(names)) != len(names):
            raise InvalidProcess("Node names must be unique.")
        dag = nx.DiGraph()
        dag.add_nodes_from(names)
        for node in self.nodes:
            for parent in node.parents:
                if parent not in dag:
                    raise InvalidProcess(f"Unknown parent {parent!r} of {node.name}.")
                dag.add_edge(parent, node.name)
        if not nx.is_directed_acyclic_graph(dag):
            raise InvalidProcess("Process DAG has a cycle.")
        pairs: list[tuple[str, int]] = []
        for node in self.nodes:
            pairs.extend(node.in_space.subsystems)
            if node.out_space is not None:
                pairs.extend(node.out_space.subsystems)
        space = HilbertSpace(tuple(pairs))
        for node in self.nodes:
            factor = self.factors.get(node.name)
            if factor is None:
                raise InvalidProcess(f"Node {node.name} has no factor.")
            if factor.output_space != node.in_space:
                raise InvalidProcess(f"Factor of {node.name} must output onto its input space.")
            allowed: set[str] = set()
            for parent in node.parents:
                out = self.node(parent).out_space
                allowed |= set(out.labels) if out is not None else set()
            if not set(factor.input_labels) <= allowed:
                raise InvalidProcess(f"Factor of {node.name} reads beyond its parents' outputs.")
            if node.parents and factor.input_space is None:
                raise InvalidProcess(f"Factor of {node.name} ignores its parents.")
        object.__setattr__(self, "factors", dict(self.factors))
        object.__setattr__(self, "space", space)

    def node(self, name: str) -> ProcessNode:
        try:
            return next(node for node in self.nodes if node.name == name)
        except StopIteration as exc:
            raise InvalidProcess(f"No node named {name!r}.") from exc

    def dag(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for node in self.nodes:
            graph.add_node(node.name)
            graph.add_edges_from((parent, node.name) for parent in node.parents)
        return graph

    def padded(self, name: str) -> np.ndarray:
        factor = self.factors[name]
        return embed(factor.matrix, factor.space, self.space)

    def sigma_for_order(self, order: Sequence[str]) -> np.ndarray:
        result = np.eye(self.space.total_dim, dtype=complex)
        for name in order:
            result = result @ self.padded(name)
        return result

    @property
    def sigma(self) -> np.ndarray:
        return self.sigma_for_order([node.name for node in self.nodes])


class QmcReport(BaseModel):
    non_commuting: list[tuple[str, str, float]] = Field(default_factory=list)
    product_error: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.non_commuting and self.product_error < COMMUTATOR_TOL


def check_qmc(p: ProcessOperator, sigma: np.ndarray | None = None) -> QmcReport:
    """Pairwise commutation of padded factors and ``sigma == prod factors``.

    ``sigma`` defaults to the process's own product; pass a candidate operator to
    test it against the factorization.
    """
    names = [node.name for node in p.nodes]
    padded = {name: p.padded(name) for name in names}
    report = QmcReport()
    for a, b in itertools.combinations(names, 2):
        norm = float(np.linalg.norm(padded[a] @ padded[b] - padded[b] @ padded[a]))
        if norm >= COMMUTATOR_TOL:
            report.non_commuting.append((a, b, norm))
    product = p.sigma
    candidate = product if sigma is None else np.asarray(sigma)
    report.product_error = float(np.abs(candidate - product).max())
    if not report.ok:
        logger.info("Quantum Markov condition fails: %s", report.non_commuting)
    return report


def intervention_operator(p: ProcessOperator, interventions: Mapping[str, InterventionMap]) -> np.ndarray:
    missing = [node.name for node in p.nodes if node.name not in interventions]
    if missing:
        raise IncompleteInterventionSet(f"No intervention for nodes {missing}.")
    total = np.eye(p.space.total_dim, dtype=complex)
    for node in p.nodes:
        item = interventions[node.name]
        if item.space != node.space:
            raise SpaceMismatch(f"Intervention for {node.name} acts on the wrong space.")
        total = total @ embed(item.tau, item.space, p.space)
    return total


def qcm_born(p: ProcessOperator, interventions: Mapping[str, InterventionMap]) -> float:
    """``P = Tr[sigma * (x)_A tau_A]``."""
    return float(np.real(np.trace(p.sigma @ intervention_operator(p, interventions))))


def normalization(p: ProcessOperator, families: Mapping[str, Sequence[InterventionMap]]) -> float:
    """Total probability over every outcome combination of one setting per node."""
    names = [node.name for node in p.nodes]
    missing = [name for name in names if name not in families]
    if missing:
        raise IncompleteInterventionSet(f"No instrument family for nodes {missing}.")
    sigma = p.sigma
    total = 0.0
    for combo in itertools.product(*(families[name] for name in names)):
        chosen = dict(zip(names, combo, strict=True))
        total += float(np.real(np.trace(sigma @ intervention_operator(p, chosen))))
    return total


def process_to_json(p: ProcessOperator) -> dict[str, Any]:
    return {
        "nodes": [
            {
                "name": node.name,
                "in": list(node.in_space.labels),
                "out": None if node.out_space is None else list(node.out_space.labels),
                "parents": list(node.parents),
                "tag": node.tag,
            }
            for node in p.nodes
        ],
        "factors": {
            name: {
                "output": list(factor.output_labels),
                "input": list(factor.input_labels),
                "matrix": complex_pairs(factor.matrix),
            }
            for name, factor in p.factors.items()
        },
    }


__all__ = [
    "InterventionMap",
    "ProcessNode",
    "ProcessOperator",
    "QmcReport",
    "check_qmc",
    "instrument_is_complete",
    "intervention_operator",
    "normalization",
    "process_to_json",
    "qcm_born",
]
