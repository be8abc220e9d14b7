from __future__ import annotations

import math
import unittest

from pydantic import ValidationError

from quantum_core.operations import Branch
from quantum_core.rng import trial_rng
from scenarios.models import (
    Amplitudes,
    Scenario,
    ScenarioConfig,
    TrialRecord,
    binomial_radius,
    frequency_checks,
    tabulate,
)
from scenarios.sampling import BranchSampler


class ScenarioConfigTest(unittest.TestCase):
    def test_defaults(self) -> None:
        config = ScenarioConfig(scenario=Scenario.EPR_BELL)
        self.assertEqual(config.alice_angles, (0.0, math.pi / 2))
        self.assertEqual(config.bob_angles, (5 * math.pi / 4, 7 * math.pi / 4))
        self.assertTrue(config.lab_open)
        self.assertEqual(Amplitudes().weights(), dict.fromkeys(("alpha", "beta", "gamma", "delta"), 0.25))

    def test_trials_must_be_positive(self) -> None:
        with self.assertRaises(ValidationError):
            ScenarioConfig(scenario="toy-sdc", trials=0)

    def test_unknown_keys_rejected(self) -> None:
        with self.assertRaises(ValidationError):
            ScenarioConfig.model_validate({"scenario": "toy-sdc", "colour": "blue"})


class TabulateTest(unittest.TestCase):
    def _records(self, outcomes: list[str]) -> list[TrialRecord]:
        return [TrialRecord(trial=k, outcome=o) for k, o in enumerate(outcomes)]

    def test_frequencies_and_radii(self) -> None:
        rows = tabulate(self._records(["a", "a", "b", "a"]), {"a": 0.75, "b": 0.25, "c": 0.0})
        by_outcome = {row.outcome: row for row in rows}
        self.assertEqual(by_outcome["a"].count, 3)
        self.assertEqual(by_outcome["c"].frequency, 0.0)
        self.assertAlmostEqual(by_outcome["b"].radius, 3 * math.sqrt(0.25 * 0.75 / 4))
        self.assertTrue(all(row.within for row in rows))
        checks = {item.name: item.passed for item in frequency_checks(rows)}
        self.assertTrue(checks["frequencies_sum_to_one"])
        self.assertIn("frequency[c]", checks)

    def test_outcome_outside_alphabet(self) -> None:
        with self.assertRaises(KeyError):
            tabulate(self._records(["z"]), {"a": 1.0})

    def test_degenerate_radius(self) -> None:
        self.assertEqual(binomial_radius(1.0, 100), 0.0)
        self.assertEqual(binomial_radius(0.0, 100), 0.0)


class BranchSamplerTest(unittest.TestCase):
    def setUp(self) -> None:
        self.expanded: list[tuple] = []

        def expand(path: tuple) -> list[Branch]:
            self.expanded.append(path)
            if not path:
                return [Branch("x", 0.25, None), Branch("y", 0.75, None), Branch("z", 0.0, None)]
            if len(path) == 1:
                return [Branch(0, 0.5, None), Branch(1, 0.5, None)]
            return []

        self.sampler = BranchSampler(expand)

    def test_distribution_skips_impossible_branches(self) -> None:
        distribution = self.sampler.distribution()
        self.assertEqual(len(distribution), 4)
        self.assertAlmostEqual(distribution[("x", 0)], 0.125)
        self.assertAlmostEqual(sum(distribution.values()), 1.0)
        self.assertNotIn(("z",), self.expanded)

    def test_nodes_expand_once(self) -> None:
        for trial in range(50):
            self.sampler.sample(trial_rng(3, trial))
        self.assertEqual(len(self.expanded), len(set(self.expanded)))

    def test_sampling_is_reproducible(self) -> None:
        first = [self.sampler.sample(trial_rng(8, trial)) for trial in range(30)]
        second = [self.sampler.sample(trial_rng(8, trial)) for trial in range(30)]
        self.assertEqual(first, second)
        self.assertTrue(all(len(path) == 2 and path[0] != "z" for path in first))


if __name__ == "__main__":
    unittest.main()
