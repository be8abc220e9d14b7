"""Pure functions over quantum carriers: tensor, trace, evolution, entropy, sampling."""

from __future__ import annotations

import logging
import math
from collections.abc import Hashable, Iterable, Mapping
from dataclasses import dataclass
from typing import TypeVar, overload

import numpy as np

from .errors import (
    InvalidPartition,
    InvalidState,
    LabelClash,
    NumericalDegeneracy,
    SpaceMismatch,
)
from .models import (
    ENTROPY_FLOOR,
    NORM_TOL,
    PROBABILITY_FLOOR,
    DensityOperator,
    HilbertSpace,
    Observable,
    PureState,
    UnitaryEvolution,
)

logger = logging.getLogger(__name__)

Carrier = TypeVar("Carrier", PureState, DensityOperator)
Outcome = TypeVar("Outcome", bound=Hashable)


@overload
def tensor(a: PureState, b: PureState) -> PureState: ...
@overload
def tensor(a: DensityOperator, b: DensityOperator) -> DensityOperator: ...
@overload
def tensor(a: Observable, b: Observable) -> Observable: ...
def tensor(a, b):  # type: ignore[no-untyped-def]
    """Kronecker product of two carriers of the same kind on disjoint labels."""
    if type(a) is not type(b):
        raise SpaceMismatch(f"Cannot tensor {type(a).__name__} with {type(b).__name__}.")
    clash = sorted(set(a.space.labels) & set(b.space.labels))
    if clash:
        raise LabelClash(f"Subsystem labels collide: {clash}")
    space = a.space.concat(b.space)
    if isinstance(a, PureState):
        return PureState(space, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, DensityOperator):
        return DensityOperator(space, np.kron(a.matrix, b.matrix))
    return Observable(space, np.kron(a.matrix, b.matrix))


def _permutation(source: tuple[str, ...], target: tuple[str, ...]) -> list[int]:
    return [source.index(label) for label in target]


def embed(operator: np.ndarray, sub: HilbertSpace, space: HilbertSpace) -> np.ndarray:
    """Pad an operator on ``sub`` with identities so it acts on ``space``."""
    missing = set(sub.labels) - set(space.labels)
    if missing:
        raise SpaceMismatch(f"Labels {sorted(missing)} absent from target space.")
    operator = np.asarray(operator, dtype=complex)
    if operator.shape != (sub.total_dim, sub.total_dim):
        raise SpaceMismatch(f"Operator shape {operator.shape} does not match {sub.labels}.")
    if sub.labels == space.labels:
        return operator.copy()
    rest = tuple(label for label in space.labels if label not in sub.labels)
    rest_dim = math.prod(space.dim(label) for label in rest)
    padded = np.kron(operator, np.eye(rest_dim, dtype=complex))
    source = sub.labels + rest
    dims = [sub.dim(label) if label in sub else space.dim(label) for label in source]
    perm = _permutation(source, space.labels)
    n = len(source)
    shaped = padded.reshape(dims + dims).transpose(perm + [p + n for p in perm])
    return shaped.reshape(space.total_dim, space.total_dim)


def embed_unitary(u: UnitaryEvolution, space: HilbertSpace) -> UnitaryEvolution:
    return UnitaryEvolution(space, embed(u.matrix, u.space, space))


def reorder(state: Carrier, order: Iterable[str]) -> Carrier:
    """Same carrier with subsystems permuted to ``order``."""
    order = tuple(order)
    if sorted(order) != sorted(state.space.labels):
        raise SpaceMismatch(f"Order {order} is not a permutation of {state.space.labels}.")
    space = HilbertSpace(tuple((label, state.space.dim(label)) for label in order))
    perm = _permutation(state.space.labels, order)
    dims = list(state.space.dims)
    if isinstance(state, PureState):
        vector = state.amplitudes.reshape(dims).transpose(perm).reshape(-1)
        return PureState(space, vector)
    n = len(dims)
    matrix = state.matrix.reshape(dims + dims).transpose(perm + [p + n for p in perm])
    return DensityOperator(space, matrix.reshape(space.total_dim, space.total_dim))


def _as_density(state: PureState | DensityOperator) -> DensityOperator:
    return state.density() if isinstance(state, PureState) else state


def partial_trace(rho: PureState | DensityOperator, keep: Iterable[str]) -> DensityOperator:
    """Reduced state on ``keep``; kept subsystems retain their original order."""
    rho = _as_density(rho)
    keep_set = set(keep)
    unknown = keep_set - set(rho.space.labels)
    if unknown:
        raise SpaceMismatch(f"Labels {sorted(unknown)} not in space {rho.space.labels}.")
    if not keep_set or keep_set == set(rho.space.labels):
        raise InvalidPartition("Keep set must be a non-empty proper subset of the labels.")
    kept = rho.space.restrict(keep_set)
    dropped = tuple(label for label in rho.space.labels if label not in keep_set)
    order = kept.labels + dropped
    dims = list(rho.space.dims)
    n = len(dims)
    perm = _permutation(rho.space.labels, order)
    d_keep = kept.total_dim
    d_drop = rho.space.total_dim // d_keep
    shaped = rho.matrix.reshape(dims + dims).transpose(perm + [p + n for p in perm])
    shaped = shaped.reshape(d_keep, d_drop, d_keep, d_drop)
    reduced = np.einsum("ijkj->ik", shaped)
    return DensityOperator(kept, (reduced + reduced.conj().T) / 2)


@overload
def evolve(state: PureState, u: UnitaryEvolution) -> PureState: ...
@overload
def evolve(state: DensityOperator, u: UnitaryEvolution) -> DensityOperator: ...
def evolve(state, u):  # type: ignore[no-untyped-def]
    """``U psi`` for pure states, ``U rho U^dagger`` for density operators."""
    if state.space != u.space:
        raise SpaceMismatch(
            f"Unitary acts on {u.space.labels}, state lives on {state.space.labels}."
        )
    if isinstance(state, PureState):
        vector = u.matrix @ state.amplitudes
        return PureState(state.space, vector / np.linalg.norm(vector))
    matrix = u.matrix @ state.matrix @ u.matrix.conj().T
    return DensityOperator(state.space, (matrix + matrix.conj().T) / 2)


def von_neumann_entropy(rho: PureState | DensityOperator) -> float:
    """``-tr(rho ln rho)`` in nats; eigenvalues below the floor contribute zero."""
    rho = _as_density(rho)
    values = np.linalg.eigvalsh(rho.matrix)
    values = values[values > ENTROPY_FLOOR]
    entropy = -float(np.sum(values * np.log(values)))
    return min(max(entropy, 0.0), math.log(rho.space.total_dim))


def expectation(rho: PureState | DensityOperator, obs: Observable) -> float:
    rho = _as_density(rho)
    if rho.space != obs.space:
        raise SpaceMismatch("Observable and state live on different spaces.")
    return float(np.real(np.trace(rho.matrix @ obs.matrix)))


def fidelity(a: PureState | DensityOperator, b: PureState | DensityOperator) -> float:
    """Overlap fidelity; at least one argument must be pure."""
    if a.space != b.space:
        raise SpaceMismatch("Fidelity between carriers on different spaces.")
    if isinstance(a, PureState) and isinstance(b, PureState):
        return abs(a.overlap(b)) ** 2
    if isinstance(a, DensityOperator) and isinstance(b, DensityOperator):
        raise InvalidState("Fidelity needs at least one pure argument.")
    pure, mixed = (a, b) if isinstance(a, PureState) else (b, a)
    assert isinstance(pure, PureState) and isinstance(mixed, DensityOperator)
    return float(np.real(np.vdot(pure.amplitudes, mixed.matrix @ pure.amplitudes)))


@dataclass(frozen=True)
class Branch:
    """One outcome of a projective measurement with its Luders-updated state."""

    outcome: Hashable
    probability: float
    updated: DensityOperator | None


def born_branches(
    rho: PureState | DensityOperator, projectors: Mapping[Outcome, np.ndarray]
) -> list[Branch]:
    """All outcomes with probability ``tr(P rho)`` and update ``P rho P / p``.

    Outcomes whose probability falls below the floor carry no updated state.
    """
    rho = _as_density(rho)
    branches: list[Branch] = []
    for outcome, projector in projectors.items():
        projector = np.asarray(projector, dtype=complex)
        if projector.shape != rho.matrix.shape:
            raise SpaceMismatch(f"Projector for {outcome!r} has shape {projector.shape}.")
        probability = float(np.real(np.trace(projector @ rho.matrix)))
        if probability <= PROBABILITY_FLOOR:
            branches.append(Branch(outcome, max(probability, 0.0), None))
            continue
        collapsed = projector @ rho.matrix @ projector / probability
        branches.append(
            Branch(outcome, probability, DensityOperator(rho.space, (collapsed + collapsed.conj().T) / 2))
        )
    total = sum(branch.probability for branch in branches)
    if all(branch.updated is None for branch in branches):
        raise NumericalDegeneracy("Every outcome probability is below the sampling floor.")
    if abs(total - 1.0) > NORM_TOL:
        raise InvalidState(f"Measurement probabilities sum to {total:.12g}, not 1.")
    return branches


def draw(branches: list[Branch], rng: np.random.Generator) -> Branch:
    """Pick one branch with its Born weight."""
    weights = np.array([branch.probability for branch in branches], dtype=float)
    weights[weights <= PROBABILITY_FLOOR] = 0.0
    index = int(rng.choice(len(branches), p=weights / weights.sum()))
    return branches[index]


def born_probabilities(
    rho: PureState | DensityOperator, obs: Observable
) -> dict[float, float]:
    rho = _as_density(rho)
    if rho.space != obs.space:
        raise SpaceMismatch("Observable and state live on different spaces.")
    return {
        float(value): float(np.real(np.trace(obs.projector(k) @ rho.matrix)))
        for k, value in enumerate(obs.eigenvalues)
    }


def measure(
    rho: PureState | DensityOperator,
    projectors: Mapping[Outcome, np.ndarray],
    rng: np.random.Generator,
) -> tuple[Outcome, DensityOperator]:
    """Projective measurement with an arbitrary complete projector family."""
    branch = draw(born_branches(rho, projectors), rng)
    assert branch.updated is not None
    return branch.outcome, branch.updated  # type: ignore[return-value]


def spectral_projectors(obs: Observable) -> dict[float, np.ndarray]:
    return {float(value): obs.projector(k) for k, value in enumerate(obs.eigenvalues)}


def local_projectors(obs: Observable, space: HilbertSpace) -> dict[float, np.ndarray]:
    """Spectral projectors of a subsystem observable lifted onto ``space``."""
    return {value: embed(projector, obs.space, space) for value, projector in spectral_projectors(obs).items()}


def born_sample(
    rho: PureState | DensityOperator, obs: Observable, rng: np.random.Generator
) -> tuple[float, DensityOperator]:
    """Draw an eigenvalue with probability ``tr(P_i rho)`` and collapse onto it."""
    rho = _as_density(rho)
    if rho.space != obs.space:
        raise SpaceMismatch("Observable and state live on different spaces.")
    value, updated = measure(rho, spectral_projectors(obs), rng)
    logger.debug("Sampled eigenvalue %s", value)
    return value, updated


def measure_local(
    rho: PureState | DensityOperator, obs: Observable, rng: np.random.Generator
) -> tuple[float, DensityOperator]:
    """Measure an observable defined on a subset of the state's subsystems."""
    rho = _as_density(rho)
    return measure(rho, local_projectors(obs, rho.space), rng)


__all__ = [
    "Branch",
    "born_branches",
    "born_probabilities",
    "born_sample",
    "draw",
    "embed",
    "embed_unitary",
    "evolve",
    "expectation",
    "fidelity",
    "local_projectors",
    "measure",
    "measure_local",
    "partial_trace",
    "reorder",
    "spectral_projectors",
    "tensor",
    "von_neumann_entropy",
]
