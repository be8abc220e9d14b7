"""Memoized outcome trees shared by every trial of a run."""

from __future__ import annotations

import logging
from collections.abc import Callable, Hashable, Iterator

import numpy as np

from quantum_core.models import PROBABILITY_FLOOR
from quantum_core.operations import Branch, draw

logger = logging.getLogger(__name__)

Path = tuple[Hashable, ...]


class BranchSampler:
    """Walks an outcome tree whose nodes are expanded once and cached.

    ``expand(path)`` returns the branches that follow ``path``, or an empty list
    at a leaf. Trials differ only in the generator they draw with.
    """

    def __init__(self, expand: Callable[[Path], list[Branch]]):
        self._expand = expand
        self._cache: dict[Path, list[Branch]] = {}

    def branches(self, path: Path = ()) -> list[Branch]:
        if path not in self._cache:
            self._cache[path] = self._expand(path)
            logger.debug("Expanded outcome node %s into %d branches", path, len(self._cache[path]))
        return self._cache[path]

    def sample(self, rng: np.random.Generator) -> Path:
        path: Path = ()
        while branches := self.branches(path):
            path = (*path, draw(branches, rng).outcome)
        return path

    def leaves(self, path: Path = (), weight: float = 1.0) -> Iterator[tuple[Path, float]]:
        """Every reachable leaf with its product probability."""
        branches = self.branches(path)
        if not branches:
            yield path, weight
            return
        for branch in branches:
            if branch.probability <= PROBABILITY_FLOOR:
                continue
            yield from self.leaves((*path, branch.outcome), weight * branch.probability)

    def distribution(self) -> dict[Path, float]:
        return dict(self.leaves())


__all__ = ["BranchSampler", "Path"]
