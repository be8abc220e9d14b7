"""Choi representations of channels.

Convention: ``J = sum_ij E(|i><j|) (x) |i><j|`` on ``output (x) input`` with the
unnormalized maximally entangled vector ``sum_i |i>|i>``. A channel is applied
as ``E(rho) = Tr_in[J (I_out (x) rho^T)]`` and is trace preserving iff
``Tr_out J = I_in``.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from quantum_core.errors import InvalidState, SpaceMismatch
from quantum_core.models import NORM_TOL, DensityOperator, HilbertSpace, UnitaryEvolution
from quantum_core.operations import embed

INFLUENCE_TOL = 1e-8


def trace_out(matrix: np.ndarray, space: HilbertSpace, drop: Iterable[str]) -> tuple[np.ndarray, HilbertSpace]:
    """Partial trace of an arbitrary operator; kept labels keep their order."""
    drop_set = set(drop)
    kept = tuple(label for label in space.labels if label not in drop_set)
    if not kept:
        raise SpaceMismatch("Cannot trace out every subsystem of an operator.")
    kept_space = space.restrict(kept)
    dims = list(space.dims)
    n = len(dims)
    order = [space.index(label) for label in kept] + [
        space.index(label) for label in space.labels if label in drop_set
    ]
    d_keep = kept_space.total_dim
    d_drop = space.total_dim // d_keep
    shaped = np.asarray(matrix).reshape(dims + dims).transpose(order + [p + n for p in order])
    reduced = np.einsum("ijkj->ik", shaped.reshape(d_keep, d_drop, d_keep, d_drop))
    return reduced, kept_space


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """Positive semi-definite operator on ``output (x) input``.

    ``input_space`` is None for a state (a channel from nothing).
    """

    output_space: HilbertSpace
    input_space: HilbertSpace | None
    matrix: np.ndarray

    def __post_init__(self) -> None:
        matrix = np.array(self.matrix, dtype=complex)
        dim = self.space.total_dim
        if matrix.shape != (dim, dim):
            raise SpaceMismatch(f"Choi shape {matrix.shape} does not match {self.space.labels}.")
        if not np.allclose(matrix, matrix.conj().T, atol=NORM_TOL, rtol=0.0):
            raise InvalidState("Choi matrix is not Hermitian.")
        if float(np.linalg.eigvalsh(matrix)[0]) < -NORM_TOL:
            raise InvalidState("Choi matrix is not positive semi-definite.")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)

    @property
    def space(self) -> HilbertSpace:
        if self.input_space is None:
            return self.output_space
        return self.output_space.concat(self.input_space)

    @property
    def input_labels(self) -> tuple[str, ...]:
        return () if self.input_space is None else self.input_space.labels

    @property
    def output_labels(self) -> tuple[str, ...]:
        return self.output_space.labels

    def output_trace(self) -> np.ndarray:
        if self.input_space is None:
            return np.array([[np.trace(self.matrix)]])
        reduced, _ = trace_out(self.matrix, self.space, self.output_labels)
        return reduced

    def is_trace_preserving(self, atol: float = NORM_TOL) -> bool:
        reduced = self.output_trace()
        return bool(np.allclose(reduced, np.eye(reduced.shape[0]), atol=atol, rtol=0.0))

    def is_cptp(self, atol: float = NORM_TOL) -> bool:
        # Positivity is enforced at construction.
        return self.is_trace_preserving(atol)

    def rank(self, tol: float = NORM_TOL) -> int:
        return int(np.sum(np.linalg.eigvalsh(self.matrix) > tol))

    def max_off_diagonal(self) -> float:
        off = self.matrix - np.diag(np.diag(self.matrix))
        return float(np.abs(off).max(initial=0.0))


def _renamed(space: HilbertSpace, labels: Sequence[str]) -> HilbertSpace:
    if len(labels) != len(space.labels):
        raise SpaceMismatch(f"Expected {len(space.labels)} output labels, got {len(labels)}.")
    return HilbertSpace(tuple(zip(labels, space.dims, strict=True)))


def choi_of_unitary(
    u: UnitaryEvolution, input_labels: Sequence[str], output_labels: Sequence[str]
) -> ChoiMatrix:
    """Rank-one Choi ``|U>><<U|`` of ``rho -> U rho U^dagger``."""
    if tuple(input_labels) != u.space.labels:
        raise SpaceMismatch(f"Unitary acts on {u.space.labels}, not {tuple(input_labels)}.")
    output_space = _renamed(u.space, output_labels)
    vector = u.matrix.reshape(-1)
    return ChoiMatrix(output_space, u.space, np.outer(vector, vector.conj()))


def choi_of_kraus(
    kraus: Sequence[np.ndarray], input_space: HilbertSpace, output_space: HilbertSpace
) -> ChoiMatrix:
    """``sum_k |K_k>><<K_k|``; each ``K_k`` maps input to output."""
    shape = (output_space.total_dim, input_space.total_dim)
    matrix = np.zeros((shape[0] * shape[1],) * 2, dtype=complex)
    for op in kraus:
        op = np.asarray(op, dtype=complex)
        if op.shape != shape:
            raise SpaceMismatch(f"Kraus operator shape {op.shape} != {shape}.")
        vector = op.reshape(-1)
        matrix += np.outer(vector, vector.conj())
    return ChoiMatrix(output_space, input_space, matrix)


def choi_of_classical(
    stochastic: np.ndarray, input_space: HilbertSpace, output_space: HilbertSpace
) -> ChoiMatrix:
    """Diagonal Choi of the classical channel ``P(out | in) = stochastic[out, in]``."""
    table = np.asarray(stochastic, dtype=float)
    if table.shape != (output_space.total_dim, input_space.total_dim):
        raise SpaceMismatch(f"Stochastic matrix shape {table.shape} does not match the spaces.")
    if (table < 0).any() or not np.allclose(table.sum(axis=0), 1.0, atol=NORM_TOL):
        raise InvalidState("Columns of a stochastic matrix must be distributions.")
    return ChoiMatrix(output_space, input_space, np.diag(table.reshape(-1)).astype(complex))


def dephasing(input_space: HilbertSpace, output_labels: Sequence[str]) -> ChoiMatrix:
    """Complete dephasing in the computational basis, relabeled onto ``output_labels``."""
    output_space = _renamed(input_space, output_labels)
    return choi_of_classical(np.eye(input_space.total_dim), input_space, output_space)


def state_factor(rho: DensityOperator) -> ChoiMatrix:
    return ChoiMatrix(rho.space, None, rho.matrix)


def apply_choi(choi: ChoiMatrix, rho: DensityOperator) -> DensityOperator:
    """``E(rho) = Tr_in[J (I_out (x) rho^T)]``."""
    if choi.input_space is None or rho.space != choi.input_space:
        raise SpaceMismatch("State does not live on the channel's input space.")
    d_out, d_in = choi.output_space.total_dim, choi.input_space.total_dim
    shaped = choi.matrix.reshape(d_out, d_in, d_out, d_in)
    output = np.einsum("aibj,ij->ab", shaped, rho.matrix)
    return DensityOperator(choi.output_space, (output + output.conj().T) / 2)


def no_influence(
    u_choi: ChoiMatrix,
    source: Sequence[str],
    target: Sequence[str],
    atol: float = INFLUENCE_TOL,
) -> bool:
    """True iff ``Tr_Z J = J_{K|Y} (x) I_X`` for ``X = source`` and ``K = target``.

    ``Z`` is every output outside ``target``; ``Y`` every input outside ``source``.
    """
    if u_choi.input_space is None:
        raise SpaceMismatch("Influence needs a channel, not a state.")
    source_set, target_set = set(source), set(target)
    if not source_set <= set(u_choi.input_labels) or not target_set <= set(u_choi.output_labels):
        raise SpaceMismatch("Source must be inputs and target must be outputs of the channel.")
    discarded = [label for label in u_choi.output_labels if label not in target_set]
    traced, space = (
        trace_out(u_choi.matrix, u_choi.space, discarded)
        if discarded
        else (u_choi.matrix, u_choi.space)
    )
    without_source, rest = trace_out(traced, space, source_set)
    d_source = space.total_dim // rest.total_dim
    rebuilt = embed(without_source / d_source, rest, space)
    return bool(np.allclose(traced, rebuilt, atol=atol, rtol=0.0))


__all__ = [
    "ChoiMatrix",
    "apply_choi",
    "choi_of_classical",
    "choi_of_kraus",
    "choi_of_unitary",
    "dephasing",
    "no_influence",
    "state_factor",
    "trace_out",
]
