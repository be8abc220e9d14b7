"""Value carriers over labeled composite Hilbert spaces.

Every carrier is a frozen dataclass holding a read-only numpy array. Basis
ordering is row-major over the subsystem sequence: the first label is the most
significant digit, so for ``(A, B)`` the basis runs ``00, 01, 10, 11``.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from config import settings

from .errors import (
    DegenerateObservable,
    DimensionCapExceeded,
    InvalidState,
    LabelClash,
    SpaceMismatch,
)

NORM_TOL = 1e-9
UNITARITY_TOL = 1e-8
EIGEN_GAP_TOL = 1e-9
ENTROPY_FLOOR = 1e-12
PROBABILITY_FLOOR = 1e-12


def _frozen(values: np.ndarray | Sequence, *, ndim: int) -> np.ndarray:
    array = np.array(values, dtype=complex, copy=True)
    if array.ndim != ndim:
        raise InvalidState(f"Expected a {ndim}-d array, got shape {array.shape}.")
    array.setflags(write=False)
    return array


def _canonical_phase(vector: np.ndarray) -> np.ndarray:
    """Rotate ``vector`` so its first non-negligible entry is real and positive."""
    for value in vector:
        if abs(value) > PROBABILITY_FLOOR:
            return vector * (abs(value) / value)
    return vector


@dataclass(frozen=True)
class HilbertSpace:
    """Ordered sequence of ``(label, dimension)`` pairs."""

    subsystems: tuple[tuple[str, int], ...]

    def __post_init__(self) -> None:
        pairs = tuple((str(label), int(dim)) for label, dim in self.subsystems)
        object.__setattr__(self, "subsystems", pairs)
        labels = [label for label, _ in pairs]
        if not labels:
            raise InvalidState("A Hilbert space needs at least one subsystem.")
        duplicates = sorted({label for label in labels if labels.count(label) > 1})
        if duplicates:
            raise LabelClash(f"Duplicate subsystem labels: {duplicates}")
        for label, dim in pairs:
            if dim < 2:
                raise InvalidState(
                    f"Subsystem {label!r} has dimension {dim}; model vacuum as a level."
                )
        if self.total_dim > settings.DIMENSION_CAP:
            raise DimensionCapExceeded(
                f"Total dimension {self.total_dim} exceeds cap {settings.DIMENSION_CAP}."
            )

    @classmethod
    def of(cls, *pairs: tuple[str, int]) -> HilbertSpace:
        return cls(tuple(pairs))

    @classmethod
    def qubits(cls, *labels: str) -> HilbertSpace:
        return cls(tuple((label, 2) for label in labels))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.subsystems)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.subsystems)

    @property
    def total_dim(self) -> int:
        return math.prod(self.dims)

    def dim(self, label: str) -> int:
        return self.dims[self.index(label)]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError as exc:
            raise SpaceMismatch(f"Label {label!r} not in space {self.labels}.") from exc

    def __contains__(self, label: object) -> bool:
        return label in self.labels

    def concat(self, other: HilbertSpace) -> HilbertSpace:
        clash = sorted(set(self.labels) & set(other.labels))
        if clash:
            raise LabelClash(f"Subsystem labels collide: {clash}")
        return HilbertSpace(self.subsystems + other.subsystems)

    def restrict(self, labels: Iterable[str]) -> HilbertSpace:
        """Sub-space on ``labels`` in this space's order."""
        wanted = set(labels)
        missing = wanted - set(self.labels)
        if missing:
            raise SpaceMismatch(f"Labels {sorted(missing)} not in space {self.labels}.")
        return HilbertSpace(tuple(pair for pair in self.subsystems if pair[0] in wanted))

    def basis_index(self, levels: Mapping[str, int]) -> int:
        """Row-major index of the product basis vector with the given levels."""
        index = 0
        for label, dim in self.subsystems:
            level = int(levels.get(label, 0))
            if not 0 <= level < dim:
                raise InvalidState(f"Level {level} out of range for {label!r} (dim {dim}).")
            index = index * dim + level
        return index

    def levels_of(self, index: int) -> dict[str, int]:
        levels: dict[str, int] = {}
        for label, dim in reversed(self.subsystems):
            index, levels[label] = divmod(index, dim)
        return {label: levels[label] for label in self.labels}


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector on a labeled space."""

    space: HilbertSpace
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amplitudes = _frozen(self.amplitudes, ndim=1)
        if amplitudes.shape[0] != self.space.total_dim:
            raise SpaceMismatch(
                f"Vector length {amplitudes.shape[0]} != dimension {self.space.total_dim}."
            )
        norm = float(np.linalg.norm(amplitudes))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidState(f"State norm {norm:.12g} deviates from 1.")
        object.__setattr__(self, "amplitudes", amplitudes)

    @classmethod
    def basis(cls, space: HilbertSpace, levels: Mapping[str, int] | None = None) -> PureState:
        vector = np.zeros(space.total_dim, dtype=complex)
        vector[space.basis_index(levels or {})] = 1.0
        return cls(space, vector)

    @classmethod
    def superposition(
        cls, space: HilbertSpace, terms: Iterable[tuple[complex, Mapping[str, int]]]
    ) -> PureState:
        """Sum of ``amplitude * |levels>`` terms; the result must already be normalized."""
        vector = np.zeros(space.total_dim, dtype=complex)
        for amplitude, levels in terms:
            vector[space.basis_index(levels)] += amplitude
        return cls(space, vector)

    def density(self) -> DensityOperator:
        return DensityOperator(self.space, np.outer(self.amplitudes, self.amplitudes.conj()))

    def canonical(self) -> PureState:
        """Representative with the first nonzero amplitude real and positive."""
        return PureState(self.space, _canonical_phase(self.amplitudes))

    def overlap(self, other: PureState) -> complex:
        if other.space != self.space:
            raise SpaceMismatch("Overlap between states on different spaces.")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def equal_up_to_phase(self, other: PureState, atol: float = NORM_TOL) -> bool:
        return abs(1.0 - abs(self.overlap(other))) <= atol


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, unit-trace, positive semi-definite matrix on a labeled space."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = _frozen(self.matrix, ndim=2)
        dim = self.space.total_dim
        if matrix.shape != (dim, dim):
            raise SpaceMismatch(f"Matrix shape {matrix.shape} != ({dim}, {dim}).")
        if not np.allclose(matrix, matrix.conj().T, atol=NORM_TOL, rtol=0.0):
            raise InvalidState("Density operator is not Hermitian.")
        trace = complex(np.trace(matrix))
        if abs(trace - 1.0) > NORM_TOL:
            raise InvalidState(f"Density operator trace {trace:.12g} deviates from 1.")
        smallest = float(np.linalg.eigvalsh(matrix)[0])
        if smallest < -NORM_TOL:
            raise InvalidState(f"Density operator has negative eigenvalue {smallest:.3e}.")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def maximally_mixed(cls, space: HilbertSpace) -> DensityOperator:
        dim = space.total_dim
        return cls(space, np.eye(dim, dtype=complex) / dim)

    @classmethod
    def diagonal(cls, space: HilbertSpace, populations: Sequence[float]) -> DensityOperator:
        return cls(space, np.diag(np.asarray(populations, dtype=complex)))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def is_pure(self, atol: float = NORM_TOL) -> bool:
        return abs(self.purity() - 1.0) <= atol


@dataclass(frozen=True, eq=False)
class Observable:
    """Non-degenerate Hermitian operator with its spectral decomposition.

    Eigenvalues are stored in ascending order. Each eigenvector column has its
    first non-negligible component real and positive.
    """

    space: HilbertSpace
    matrix: np.ndarray
    eigenvalues: np.ndarray = field(init=False)
    eigenvectors: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        matrix = _frozen(self.matrix, ndim=2)
        dim = self.space.total_dim
        if matrix.shape != (dim, dim):
            raise SpaceMismatch(f"Matrix shape {matrix.shape} != ({dim}, {dim}).")
        if not np.allclose(matrix, matrix.conj().T, atol=NORM_TOL, rtol=0.0):
            raise InvalidState("Observable is not Hermitian.")
        values, vectors = np.linalg.eigh(matrix)
        gaps = np.diff(values)
        if gaps.size and float(gaps.min()) <= EIGEN_GAP_TOL:
            raise DegenerateObservable(
                f"Observable has a repeated eigenvalue near {values[int(gaps.argmin())]:.6g}."
            )
        vectors = np.column_stack([_canonical_phase(vectors[:, k]) for k in range(dim)])
        if not np.allclose(vectors.conj().T @ vectors, np.eye(dim), atol=NORM_TOL, rtol=0.0):
            raise InvalidState("Observable eigenvectors are not orthonormal.")
        values = np.array(values, dtype=float)
        values.setflags(write=False)
        vectors.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "eigenvalues", values)
        object.__setattr__(self, "eigenvectors", vectors)

    @classmethod
    def from_spectrum(
        cls, space: HilbertSpace, eigenvalues: Sequence[float], basis: np.ndarray | None = None
    ) -> Observable:
        """Observable diagonal in ``basis`` (default: the computational basis)."""
        vectors = np.eye(space.total_dim, dtype=complex) if basis is None else np.asarray(basis)
        matrix = vectors @ np.diag(np.asarray(eigenvalues, dtype=complex)) @ vectors.conj().T
        return cls(space, matrix)

    def projector(self, k: int) -> np.ndarray:
        vector = self.eigenvectors[:, k]
        return np.outer(vector, vector.conj())

    def projectors(self) -> list[np.ndarray]:
        return [self.projector(k) for k in range(self.space.total_dim)]

    def eigenstate(self, k: int) -> PureState:
        return PureState(self.space, self.eigenvectors[:, k])

    def index_of(self, eigenvalue: float, atol: float = EIGEN_GAP_TOL) -> int:
        matches = np.flatnonzero(np.abs(self.eigenvalues - eigenvalue) <= atol)
        if matches.size == 0:
            raise InvalidState(f"{eigenvalue} is not an eigenvalue of this observable.")
        return int(matches[0])


@dataclass(frozen=True, eq=False)
class UnitaryEvolution:
    """Unitary on a labeled space, optionally built from a Hermitian generator."""

    space: HilbertSpace
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = _frozen(self.matrix, ndim=2)
        dim = self.space.total_dim
        if matrix.shape != (dim, dim):
            raise SpaceMismatch(f"Matrix shape {matrix.shape} != ({dim}, {dim}).")
        if not np.allclose(matrix.conj().T @ matrix, np.eye(dim), atol=UNITARITY_TOL, rtol=0.0):
            raise InvalidState("Matrix is not unitary within tolerance.")
        object.__setattr__(self, "matrix", matrix)

    @classmethod
    def identity(cls, space: HilbertSpace) -> UnitaryEvolution:
        return cls(space, np.eye(space.total_dim, dtype=complex))

    @classmethod
    def from_generator(
        cls, hamiltonian: Observable | np.ndarray, duration: float, space: HilbertSpace | None = None
    ) -> UnitaryEvolution:
        """``exp(-i H t)`` through the eigendecomposition of the Hermitian ``H``.

        A raw Hermitian matrix is accepted because interaction Hamiltonians are
        usually degenerate; ``space`` is then required.
        """
        if isinstance(hamiltonian, Observable):
            space = hamiltonian.space
            values, vectors = hamiltonian.eigenvalues, hamiltonian.eigenvectors
        else:
            if space is None:
                raise SpaceMismatch("A raw generator matrix needs an explicit space.")
            matrix = np.asarray(hamiltonian, dtype=complex)
            if not np.allclose(matrix, matrix.conj().T, atol=NORM_TOL, rtol=0.0):
                raise InvalidState("Generator is not Hermitian.")
            values, vectors = np.linalg.eigh(matrix)
        phases = np.exp(-1j * np.asarray(values) * float(duration))
        return cls(space, (vectors * phases) @ vectors.conj().T)

    def dagger(self) -> UnitaryEvolution:
        return UnitaryEvolution(self.space, self.matrix.conj().T)

    def then(self, other: UnitaryEvolution) -> UnitaryEvolution:
        """Apply ``self`` first, then ``other``."""
        if other.space != self.space:
            raise SpaceMismatch("Cannot compose unitaries on different spaces.")
        return UnitaryEvolution(self.space, other.matrix @ self.matrix)


__all__ = [
    "ENTROPY_FLOOR",
    "NORM_TOL",
    "PROBABILITY_FLOOR",
    "UNITARITY_TOL",
    "DensityOperator",
    "HilbertSpace",
    "Observable",
    "PureState",
    "UnitaryEvolution",
]
