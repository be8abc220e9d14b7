"""Classical limit of diagonal process operators."""

from __future__ import annotations

import itertools
import logging
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from quantum_core.models import HilbertSpace

from .errors import NotDiagonal
from .process import InterventionMap, ProcessOperator

logger = logging.getLogger(__name__)

DIAGONAL_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class ConditionalTable:
    """``probabilities[child, parent] = P(child config | parent config)``.

    Root tables have a single parent column.
    """

    node: str
    child_space: HilbertSpace
    parent_space: HilbertSpace | None
    probabilities: np.ndarray

    def lookup(self, config: Mapping[str, int]) -> float:
        child = self.child_space.basis_index(config)
        parent = 0 if self.parent_space is None else self.parent_space.basis_index(config)
        return float(self.probabilities[child, parent])

    def to_frame(self) -> pd.DataFrame:
        rows = []
        parent_dim = 1 if self.parent_space is None else self.parent_space.total_dim
        for parent in range(parent_dim):
            given = {} if self.parent_space is None else self.parent_space.levels_of(parent)
            for child in range(self.child_space.total_dim):
                rows.append(
                    {
                        "node": self.node,
                        "child": _config_text(self.child_space.levels_of(child)),
                        "parents": _config_text(given),
                        "probability": float(self.probabilities[child, parent]),
                    }
                )
        return pd.DataFrame(rows)


def _config_text(levels: Mapping[str, int]) -> str:
    return ",".join(f"{label}={level}" for label, level in levels.items())


@dataclass(frozen=True, eq=False)
class ClassicalModel:
    """Conditional probability tables whose product is the diagonal of ``sigma``."""

    process: ProcessOperator
    tables: Mapping[str, ConditionalTable]

    def joint(self, interventions: Mapping[str, InterventionMap]) -> float:
        """Sum over every basis configuration of ``prod P(child | parents) * prod diag(tau)``."""
        space = self.process.space
        nodes = self.process.nodes
        total = 0.0
        for levels in itertools.product(*(range(dim) for dim in space.dims)):
            config = dict(zip(space.labels, levels, strict=True))
            weight = 1.0
            for node in nodes:
                weight *= self.tables[node.name].lookup(config)
                if weight == 0.0:
                    break
            if weight == 0.0:
                continue
            for node in nodes:
                item = interventions[node.name]
                index = item.space.basis_index(config)
                weight *= float(np.real(item.tau[index, index]))
            total += weight
        return total

    def to_frame(self) -> pd.DataFrame:
        return pd.concat([table.to_frame() for table in self.tables.values()], ignore_index=True)

    def to_csv(self, path: str | Path) -> None:
        self.to_frame().to_csv(path, index=False)


def classical_limit(p: ProcessOperator, tol: float = DIAGONAL_TOL) -> ClassicalModel:
    """Read conditional tables off diagonal factors; coherent factors raise NotDiagonal."""
    worst = max(p.factors[node.name].max_off_diagonal() for node in p.nodes)
    if worst > tol:
        raise NotDiagonal(f"Process has coherences up to {worst:.3e}.", worst)
    tables: dict[str, ConditionalTable] = {}
    for node in p.nodes:
        factor = p.factors[node.name]
        diagonal = np.real(np.diag(factor.matrix))
        parent_dim = 1 if factor.input_space is None else factor.input_space.total_dim
        probabilities = diagonal.reshape(factor.output_space.total_dim, parent_dim)
        tables[node.name] = ConditionalTable(
            node=node.name,
            child_space=factor.output_space,
            parent_space=factor.input_space,
            probabilities=probabilities,
        )
    logger.debug("Classical limit built with %d tables", len(tables))
    return ClassicalModel(process=p, tables=tables)


__all__ = ["ClassicalModel", "ConditionalTable", "classical_limit"]
