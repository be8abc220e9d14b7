from __future__ import annotations

import math
import unittest

import numpy as np
from scipy.linalg import expm

from quantum_core.codec import from_json, to_json
from quantum_core.errors import (
    DegenerateObservable,
    DimensionCapExceeded,
    InvalidPartition,
    InvalidState,
    LabelClash,
    SpaceMismatch,
)
from quantum_core.gates import (
    HALF,
    SIGMA_X,
    SIGMA_Z,
    beam_splitter,
    controlled_rotation,
    controlled_shift,
    number_observable,
    singlet,
    spin_observable,
    swap,
)
from quantum_core.models import DensityOperator, HilbertSpace, Observable, PureState, UnitaryEvolution
from quantum_core.operations import (
    born_branches,
    born_probabilities,
    born_sample,
    embed,
    evolve,
    expectation,
    fidelity,
    local_projectors,
    measure_local,
    partial_trace,
    reorder,
    tensor,
    von_neumann_entropy,
)
from quantum_core.rng import Stream, trial_rng


def random_density(space: HilbertSpace, rng: np.random.Generator) -> DensityOperator:
    dim = space.total_dim
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return DensityOperator(space, rho / np.trace(rho))


class HilbertSpaceTest(unittest.TestCase):
    def test_duplicate_labels_clash(self) -> None:
        with self.assertRaises(LabelClash):
            HilbertSpace.qubits("A", "A")

    def test_trivial_dimension_rejected(self) -> None:
        with self.assertRaises(InvalidState):
            HilbertSpace.of(("A", 1))

    def test_dimension_cap(self) -> None:
        with self.assertRaises(DimensionCapExceeded):
            HilbertSpace.qubits(*(f"q{k}" for k in range(13)))

    def test_row_major_basis_index(self) -> None:
        space = HilbertSpace.of(("A", 2), ("B", 3))
        self.assertEqual(space.basis_index({"A": 1}), 3)
        self.assertEqual(space.basis_index({"A": 1, "B": 2}), 5)
        self.assertEqual(space.levels_of(4), {"A": 1, "B": 1})


class CarrierTest(unittest.TestCase):
    def test_unnormalized_state_rejected(self) -> None:
        with self.assertRaises(InvalidState):
            PureState(HilbertSpace.qubits("A"), np.array([1.0, 1.0]))

    def test_non_hermitian_density_rejected(self) -> None:
        with self.assertRaises(InvalidState):
            DensityOperator(HilbertSpace.qubits("A"), np.array([[0.5, 0.5], [0.0, 0.5]]))

    def test_degenerate_observable_rejected(self) -> None:
        with self.assertRaises(DegenerateObservable):
            Observable(HilbertSpace.qubits("A"), np.eye(2))

    def test_non_unitary_rejected(self) -> None:
        with self.assertRaises(InvalidState):
            UnitaryEvolution(HilbertSpace.qubits("A"), np.diag([1.0, 0.5]))

    def test_canonical_phase(self) -> None:
        space = HilbertSpace.qubits("A")
        state = PureState(space, np.array([1j * HALF, HALF]))
        canonical = state.canonical()
        self.assertAlmostEqual(canonical.amplitudes[0], HALF)
        self.assertAlmostEqual(canonical.amplitudes[1], -1j * HALF)
        self.assertTrue(state.equal_up_to_phase(canonical))

    def test_spin_eigenvalues_ascending(self) -> None:
        obs = spin_observable("A")
        np.testing.assert_allclose(obs.eigenvalues, [-0.5, 0.5])
        self.assertEqual(obs.index_of(0.5), 1)
        np.testing.assert_allclose(obs.eigenstate(1).amplitudes, [1.0, 0.0])


class TensorAndTraceTest(unittest.TestCase):
    def test_tensor_orders_labels(self) -> None:
        a = PureState.basis(HilbertSpace.qubits("A"), {"A": 0})
        b = PureState.basis(HilbertSpace.qubits("B"), {"B": 1})
        joint = tensor(a, b)
        self.assertEqual(joint.space.labels, ("A", "B"))
        np.testing.assert_allclose(joint.amplitudes, [0, 1, 0, 0])

    def test_tensor_matches_kron_for_mixed_dimensions(self) -> None:
        rng = np.random.default_rng(23)
        qubit, qutrit = HilbertSpace.of(("A", 2)), HilbertSpace.of(("B", 3))
        a = rng.normal(size=2) + 1j * rng.normal(size=2)
        b = rng.normal(size=3) + 1j * rng.normal(size=3)
        a, b = a / np.linalg.norm(a), b / np.linalg.norm(b)
        joint = tensor(PureState(qubit, a), PureState(qutrit, b))
        self.assertEqual(joint.space.dims, (2, 3))
        self.assertTrue(joint.equal_up_to_phase(PureState(joint.space, np.kron(a, b))))
        rho_a, rho_b = random_density(qubit, rng), random_density(qutrit, rng)
        np.testing.assert_allclose(tensor(rho_a, rho_b).matrix, np.kron(rho_a.matrix, rho_b.matrix), atol=1e-14)

    def test_tensor_label_clash(self) -> None:
        a = PureState.basis(HilbertSpace.qubits("A"))
        with self.assertRaises(LabelClash):
            tensor(a, a)

    def test_singlet_marginal_is_maximally_mixed(self) -> None:
        reduced = partial_trace(singlet("A", "B"), {"B"})
        np.testing.assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)
        self.assertAlmostEqual(von_neumann_entropy(reduced), math.log(2))

    def test_partial_trace_matches_index_sum(self) -> None:
        space = HilbertSpace.of(("A", 2), ("B", 3), ("C", 2))
        rho = random_density(space, np.random.default_rng(11))
        reduced = partial_trace(rho, {"A", "C"})
        kept = HilbertSpace.of(("A", 2), ("C", 2))
        oracle = np.zeros((4, 4), dtype=complex)
        for i in range(4):
            for k in range(4):
                left, right = kept.levels_of(i), kept.levels_of(k)
                oracle[i, k] = sum(
                    rho.matrix[space.basis_index({**left, "B": j}), space.basis_index({**right, "B": j})]
                    for j in range(3)
                )
        self.assertEqual(reduced.space.labels, ("A", "C"))
        np.testing.assert_allclose(reduced.matrix, oracle, atol=1e-12)

    def test_partial_trace_partition_checks(self) -> None:
        state = singlet("A", "B")
        with self.assertRaises(InvalidPartition):
            partial_trace(state, {"A", "B"})
        with self.assertRaises(InvalidPartition):
            partial_trace(state, set())
        with self.assertRaises(SpaceMismatch):
            partial_trace(state, {"Z"})

    def test_reorder_swaps_amplitudes(self) -> None:
        state = PureState.basis(HilbertSpace.qubits("A", "B"), {"A": 1})
        swapped = reorder(state, ("B", "A"))
        self.assertEqual(swapped.space.labels, ("B", "A"))
        np.testing.assert_allclose(swapped.amplitudes, [0, 1, 0, 0])

    def test_embed_pads_in_label_order(self) -> None:
        space = HilbertSpace.qubits("A", "B")
        lifted = embed(SIGMA_X, HilbertSpace.qubits("B"), space)
        np.testing.assert_allclose(lifted, np.kron(np.eye(2), SIGMA_X))


class EvolutionTest(unittest.TestCase):
    def test_generator_matches_expm(self) -> None:
        space = HilbertSpace.qubits("A", "B")
        h = np.kron(SIGMA_Z, SIGMA_X) + 0.3 * np.kron(SIGMA_X, np.eye(2))
        u = UnitaryEvolution.from_generator(h, 0.7, space=space)
        np.testing.assert_allclose(u.matrix, expm(-1j * 0.7 * h), atol=1e-10)

    def test_then_applies_left_first(self) -> None:
        space = HilbertSpace.qubits("A", "B")
        shift = controlled_shift(("A", 2), ("B", 2), space)
        flip = UnitaryEvolution(space, embed(SIGMA_X, HilbertSpace.qubits("A"), space))
        state = PureState.basis(space)
        out = evolve(state, flip.then(shift))
        np.testing.assert_allclose(out.amplitudes, [0, 0, 0, 1])

    def test_evolve_preserves_trace_of_mixed_state(self) -> None:
        space = HilbertSpace.qubits("A", "B")
        rho = random_density(space, np.random.default_rng(3))
        out = evolve(rho, beam_splitter("A", "B"))
        self.assertAlmostEqual(float(np.real(np.trace(out.matrix))), 1.0)

    def test_space_mismatch(self) -> None:
        with self.assertRaises(SpaceMismatch):
            evolve(PureState.basis(HilbertSpace.qubits("A")), beam_splitter("A", "B"))


class GateTest(unittest.TestCase):
    def test_beam_splitter_single_photon(self) -> None:
        space = HilbertSpace.qubits("a", "b")
        out = evolve(PureState.basis(space, {"a": 1}), beam_splitter("a", "b"))
        np.testing.assert_allclose(out.amplitudes, [0, 1j * HALF, HALF, 0], atol=1e-12)

    def test_swap_moves_photon(self) -> None:
        space = HilbertSpace.qubits("a", "b")
        out = evolve(PureState.basis(space, {"a": 1}), swap(("a", 2), ("b", 2)))
        self.assertTrue(out.equal_up_to_phase(PureState.basis(space, {"b": 1})))

    def test_controlled_rotation_flips_target(self) -> None:
        space = HilbertSpace.qubits("c", "t")
        u = controlled_rotation("c", "t", math.pi / 2)
        flipped = evolve(PureState.basis(space, {"c": 1}), u)
        idle = evolve(PureState.basis(space), u)
        np.testing.assert_allclose(flipped.amplitudes, [0, 0, 0, 1], atol=1e-12)
        np.testing.assert_allclose(idle.amplitudes, [1, 0, 0, 0], atol=1e-12)

    def test_number_observable_levels(self) -> None:
        obs = number_observable("m", 3)
        np.testing.assert_allclose(obs.eigenvalues, [0, 1, 2])


class MeasurementTest(unittest.TestCase):
    def test_entropy_bounds(self) -> None:
        space = HilbertSpace.qubits("A", "B")
        self.assertAlmostEqual(von_neumann_entropy(PureState.basis(space)), 0.0)
        self.assertAlmostEqual(
            von_neumann_entropy(DensityOperator.maximally_mixed(space)), math.log(4)
        )

    def test_entropy_in_bits_is_unitarily_invariant(self) -> None:
        space = HilbertSpace.qubits("A")
        rho = DensityOperator.diagonal(space, [0.25, 0.75])
        bits = von_neumann_entropy(rho) / math.log(2)
        self.assertAlmostEqual(bits, 0.811278, places=6)
        rng = np.random.default_rng(3)
        for _ in range(10):
            q, _ = np.linalg.qr(rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)))
            rotated = evolve(rho, UnitaryEvolution(space, q))
            self.assertAlmostEqual(von_neumann_entropy(rotated) / math.log(2), bits, places=9)

    def test_born_sample_frequency_within_three_sigma(self) -> None:
        trials, p_up = 100_000, 0.3
        state = PureState(HilbertSpace.qubits("A"), np.array([math.sqrt(p_up), math.sqrt(1 - p_up)]))
        obs = spin_observable("A")
        rng = np.random.default_rng(2718)
        ups = sum(born_sample(state, obs, rng)[0] == 0.5 for _ in range(trials))
        radius = 3 * math.sqrt(p_up * (1 - p_up) / trials)
        self.assertLessEqual(abs(ups / trials - p_up), radius)

    def test_born_branches_on_singlet(self) -> None:
        state = singlet("A", "B")
        branches = born_branches(state, local_projectors(spin_observable("A"), state.space))
        self.assertEqual([b.outcome for b in branches], [-0.5, 0.5])
        for branch in branches:
            self.assertAlmostEqual(branch.probability, 0.5)
            assert branch.updated is not None
            self.assertAlmostEqual(
                expectation(partial_trace(branch.updated, {"B"}), spin_observable("B")),
                -float(branch.outcome),
            )

    def test_born_probabilities_of_tilted_spin(self) -> None:
        state = PureState.basis(HilbertSpace.qubits("A"))
        probabilities = born_probabilities(state, spin_observable("A", math.pi / 2))
        self.assertEqual(len(probabilities), 2)
        for p in probabilities.values():
            self.assertAlmostEqual(p, 0.5)

    def test_incomplete_projectors_rejected(self) -> None:
        state = PureState(HilbertSpace.qubits("A"), np.array([HALF, HALF]))
        with self.assertRaises(InvalidState):
            born_branches(state, {"up": np.diag([1.0, 0.0])})

    def test_born_sample_is_reproducible(self) -> None:
        state = PureState(HilbertSpace.qubits("A"), np.array([HALF, HALF]))
        obs = spin_observable("A")
        first = [born_sample(state, obs, trial_rng(5, k))[0] for k in range(20)]
        second = [born_sample(state, obs, trial_rng(5, k))[0] for k in range(20)]
        self.assertEqual(first, second)
        self.assertEqual(set(first), {-0.5, 0.5})

    def test_measure_local_collapses_partner(self) -> None:
        outcome, updated = measure_local(singlet("A", "B"), spin_observable("A"), trial_rng(1, 0))
        reduced = partial_trace(updated, {"B"})
        self.assertAlmostEqual(expectation(reduced, spin_observable("B")), -outcome)

    def test_fidelity_needs_a_pure_argument(self) -> None:
        rho = DensityOperator.maximally_mixed(HilbertSpace.qubits("A"))
        with self.assertRaises(InvalidState):
            fidelity(rho, rho)
        self.assertAlmostEqual(fidelity(PureState.basis(rho.space), rho), 0.5)

    def test_streams_are_independent(self) -> None:
        outcomes = trial_rng(9, 0, Stream.OUTCOMES).random()
        preparation = trial_rng(9, 0, Stream.PREPARATION).random()
        self.assertNotEqual(outcomes, preparation)
        self.assertEqual(outcomes, trial_rng(9, 0, Stream.OUTCOMES).random())


class CodecTest(unittest.TestCase):
    def test_density_payload_layout(self) -> None:
        rho = singlet("A", "B").density()
        payload = to_json(rho)
        self.assertEqual(payload["kind"], "density_operator")
        self.assertEqual(payload["labels"], ["A", "B"])
        re, im = payload["data"][1][2]
        self.assertAlmostEqual(re, -0.5)
        self.assertAlmostEqual(im, 0.0)
        restored = from_json(payload)
        assert isinstance(restored, DensityOperator)
        np.testing.assert_allclose(restored.matrix, rho.matrix)

    def test_malformed_payload(self) -> None:
        with self.assertRaises(InvalidState):
            from_json({"kind": "pure_state", "labels": ["A"], "dims": [2], "data": [[1.0], [0.0]]})
        with self.assertRaises(InvalidState):
            from_json({"labels": ["A"]})


if __name__ == "__main__":
    unittest.main()
