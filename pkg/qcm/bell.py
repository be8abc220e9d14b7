"""Bell-scenario process: a common cause Lambda feeding Alice's and Bob's wings."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from typing import Literal

import numpy as np

from quantum_core.gates import singlet, spin_observable
from quantum_core.models import DensityOperator, HilbertSpace, UnitaryEvolution
from quantum_core.operations import local_projectors

from .choi import ChoiMatrix, choi_of_unitary, dephasing, state_factor
from .process import InterventionMap, ProcessNode, ProcessOperator, qcm_born

LAMBDA_IN = ("L.in.a", "L.in.b")
LAMBDA_OUT = ("L.out.a", "L.out.b")
ALICE_IN = "A.in"
BOB_IN = "B.in"
OUTCOMES = (1, -1)

# (setting, setting, outcome, outcome) -> probability
ProbabilityTable = dict[tuple[int, int, int, int], float]


def bell_nodes(
    tag: Literal["SDC", "UDC"] | None = None,
) -> tuple[ProcessNode, ProcessNode, ProcessNode]:
    lam = ProcessNode(
        name="L",
        in_space=HilbertSpace.qubits(*LAMBDA_IN),
        out_space=HilbertSpace.qubits(*LAMBDA_OUT),
        tag=tag,
    )
    alice = ProcessNode(name="A", in_space=HilbertSpace.qubits(ALICE_IN), parents=("L",), tag=tag)
    bob = ProcessNode(name="B", in_space=HilbertSpace.qubits(BOB_IN), parents=("L",), tag=tag)
    return lam, alice, bob


def shared_state(decohered: bool = False) -> DensityOperator:
    """Singlet on Lambda's input, or its dephased (z-basis) counterpart."""
    rho = singlet(*LAMBDA_IN).density()
    if decohered:
        return DensityOperator(rho.space, np.diag(np.diag(rho.matrix)))
    return rho


def _wire(source: str, target: str, decohered: bool) -> ChoiMatrix:
    if decohered:
        return dephasing(HilbertSpace.qubits(source), [target])
    return choi_of_unitary(UnitaryEvolution.identity(HilbertSpace.qubits(source)), [source], [target])


def bell_process(decohered: bool = False) -> ProcessOperator:
    """``sigma = rho_L rho_{A|L} rho_{B|L}`` with identity (or dephasing) wires."""
    lam, alice, bob = bell_nodes("UDC")
    factors = {
        "L": state_factor(shared_state(decohered)),
        "A": _wire(LAMBDA_OUT[0], ALICE_IN, decohered),
        "B": _wire(LAMBDA_OUT[1], BOB_IN, decohered),
    }
    return ProcessOperator(nodes=(lam, alice, bob), factors=factors)


def spin_family(node: ProcessNode, theta: float, setting: int) -> list[InterventionMap]:
    """Spin measurement along ``theta``; outcome +1 is the +1/2 eigenvalue."""
    obs = spin_observable(node.in_space.labels[0], theta)
    by_value = {1 if value > 0 else -1: k for k, value in enumerate(obs.eigenvalues)}
    return [
        InterventionMap.from_povm_element(node, obs.projector(by_value[outcome]), setting, outcome)
        for outcome in OUTCOMES
    ]


def qcm_table(
    p: ProcessOperator, alice_angles: Sequence[float], bob_angles: Sequence[float]
) -> ProbabilityTable:
    lam, alice, bob = p.nodes
    through = InterventionMap.identity(lam)
    table: ProbabilityTable = {}
    for s, theta_a in enumerate(alice_angles):
        for t, theta_b in enumerate(bob_angles):
            family_b = spin_family(bob, theta_b, t)
            for x, tau_a in zip(OUTCOMES, spin_family(alice, theta_a, s), strict=True):
                for y, tau_b in zip(OUTCOMES, family_b, strict=True):
                    table[(s, t, x, y)] = qcm_born(p, {"L": through, "A": tau_a, "B": tau_b})
    return table


def direct_table(
    alice_angles: Sequence[float], bob_angles: Sequence[float], decohered: bool = False
) -> ProbabilityTable:
    """Born rule applied straight to the shared two-qubit state."""
    rho = shared_state(decohered)
    a_label, b_label = LAMBDA_IN
    table: ProbabilityTable = {}
    for s, theta_a in enumerate(alice_angles):
        proj_a = local_projectors(spin_observable(a_label, theta_a), rho.space)
        for t, theta_b in enumerate(bob_angles):
            proj_b = local_projectors(spin_observable(b_label, theta_b), rho.space)
            for value_a, pa in proj_a.items():
                for value_b, pb in proj_b.items():
                    key = (s, t, 1 if value_a > 0 else -1, 1 if value_b > 0 else -1)
                    table[key] = float(np.real(np.trace(pa @ pb @ rho.matrix)))
    return table


def correlation(table: Mapping[tuple[int, int, int, int], float], s: int, t: int) -> float:
    return sum(x * y * table[(s, t, x, y)] for x in OUTCOMES for y in OUTCOMES)


def chsh(table: Mapping[tuple[int, int, int, int], float]) -> float:
    """``E(0,0) - E(0,1) + E(1,0) + E(1,1)``."""
    return (
        correlation(table, 0, 0)
        - correlation(table, 0, 1)
        + correlation(table, 1, 0)
        + correlation(table, 1, 1)
    )


__all__ = [
    "ALICE_IN",
    "BOB_IN",
    "LAMBDA_IN",
    "LAMBDA_OUT",
    "OUTCOMES",
    "ProbabilityTable",
    "bell_nodes",
    "bell_process",
    "chsh",
    "correlation",
    "direct_table",
    "qcm_table",
    "shared_state",
    "spin_family",
]
