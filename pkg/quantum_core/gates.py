"""Standard operators and states used by the scenarios.

Qubit convention: level 0 is spin up (+1/2), level 1 is spin down (-1/2).
Mode convention: a two-level mode holds 0 or 1 photons.
"""

from __future__ import annotations

import math

import numpy as np

from .models import HilbertSpace, Observable, PureState, UnitaryEvolution
from .operations import embed

IDENTITY2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

HALF = 1 / math.sqrt(2)


def spin_matrix(theta: float) -> np.ndarray:
    """Spin-1/2 component along ``theta`` in the x-z plane (0 is z)."""
    return (math.cos(theta) * SIGMA_Z + math.sin(theta) * SIGMA_X) / 2


def spin_observable(label: str, theta: float = 0.0) -> Observable:
    return Observable(HilbertSpace.qubits(label), spin_matrix(theta))


def number_observable(label: str, dim: int = 2) -> Observable:
    return Observable.from_spectrum(HilbertSpace.of((label, dim)), range(dim))


def singlet(a: str, b: str) -> PureState:
    """``(|up down> - |down up>) / sqrt(2)`` on qubits ``a`` then ``b``."""
    space = HilbertSpace.qubits(a, b)
    return PureState.superposition(space, [(HALF, {a: 0, b: 1}), (-HALF, {a: 1, b: 0})])


def _lift(matrix: np.ndarray, sub: HilbertSpace, space: HilbertSpace | None) -> UnitaryEvolution:
    target = sub if space is None else space
    return UnitaryEvolution(target, embed(matrix, sub, target))


def controlled_shift(
    control: tuple[str, int], target: tuple[str, int], space: HilbertSpace | None = None
) -> UnitaryEvolution:
    """von Neumann premeasurement ``|i>|j> -> |i>|j + i mod d>``."""
    sub = HilbertSpace.of(control, target)
    d_c, d_t = control[1], target[1]
    matrix = np.zeros((sub.total_dim, sub.total_dim), dtype=complex)
    for i in range(d_c):
        for j in range(d_t):
            matrix[i * d_t + (j + i) % d_t, i * d_t + j] = 1.0
    return _lift(matrix, sub, space)


def beam_splitter(
    a: str, b: str, space: HilbertSpace | None = None, reflection_phase: complex = 1j
) -> UnitaryEvolution:
    """50/50 splitter on two single-photon modes with phase ``reflection_phase``.

    In the basis ``00, 01, 10, 11`` a single photon maps as
    ``|10> -> c|10> + i c|01>`` and ``|01> -> i c|10> + c|01>`` with ``c = 1/sqrt(2)``;
    vacuum and the doubly occupied level are left alone.
    """
    sub = HilbertSpace.qubits(a, b)
    matrix = np.eye(4, dtype=complex)
    matrix[1:3, 1:3] = HALF * np.array(
        [[1, reflection_phase], [reflection_phase, 1]], dtype=complex
    )
    return _lift(matrix, sub, space)


def swap(a: tuple[str, int], b: tuple[str, int], space: HilbertSpace | None = None) -> UnitaryEvolution:
    if a[1] != b[1]:
        raise ValueError("Swapped subsystems must share a dimension.")
    sub = HilbertSpace.of(a, b)
    d = a[1]
    matrix = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            matrix[j * d + i, i * d + j] = 1.0
    return _lift(matrix, sub, space)


def controlled_rotation(
    control: str, target: str, theta: float, space: HilbertSpace | None = None
) -> UnitaryEvolution:
    """``exp(-i theta N_control (x) sigma_y)``; at ``theta = pi/2`` it flips the target."""
    sub = HilbertSpace.qubits(control, target)
    generator = np.kron(np.diag([0, 1]).astype(complex), SIGMA_Y)
    rotation = UnitaryEvolution.from_generator(generator, theta, space=sub)
    return _lift(rotation.matrix, sub, space)


__all__ = [
    "HALF",
    "IDENTITY2",
    "SIGMA_X",
    "SIGMA_Y",
    "SIGMA_Z",
    "beam_splitter",
    "controlled_rotation",
    "controlled_shift",
    "number_observable",
    "singlet",
    "spin_matrix",
    "spin_observable",
    "swap",
]
