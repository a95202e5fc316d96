"""
Unit tests for increasing events, inequality checks and experiment suites.
"""

import unittest
import sys
import os
from unittest import mock

import numpy as np

# Add the parent directory to the path so we can import the modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from determinantal_lab.core.checks import (CONJECTURE, THEOREM, CheckReport, bk_search, check_commuting_domination,
                                           check_conditional_na, check_conditional_projection,
                                           check_negative_association, check_tail_correlation,
                                           concentration_check, disjoint_occurrence,
                                           entropy_concavity_experiment, reevaluate)
from determinantal_lab.core.coupling import FeasibilityResult
from determinantal_lab.core.ensembles import random_projection
from determinantal_lab.core.errors import CapacityError, DomainError, StructuralError
from determinantal_lab.core.events import (IncreasingEvent, enumerate_increasing_events, events_on,
                                           up_closure)
from determinantal_lab.core.experiments import ExperimentRunner, merge_reports
from determinantal_lab.core.graphs import complete_graph, transfer_current
from determinantal_lab.core.ground import GroundSet
from determinantal_lab.core.kernels import ConditionSpec
from determinantal_lab.core.zoo import bernoulli


class TestIncreasingEvents(unittest.TestCase):
    """Test cases for increasing event enumeration."""

    def test_monotone_function_counts(self):
        """Test the number of increasing events on supports of size 0 to 4."""
        counts = [len(enumerate_increasing_events(k)) for k in range(5)]
        self.assertEqual(counts, [2, 3, 6, 20, 168])

    def test_support_limit(self):
        with self.assertRaises(CapacityError):
            enumerate_increasing_events(5)

    def test_non_increasing_family_rejected(self):
        ground = GroundSet.of_size(2)
        with self.assertRaises(StructuralError):
            IncreasingEvent(ground, 0b11, frozenset({0b01}))

    def test_up_closure(self):
        ground = GroundSet.of_size(3)
        event = up_closure(ground, 0b011, [0b001])
        self.assertEqual(event.family, frozenset({0b001, 0b011}))
        self.assertEqual(event.minimal_members(), [0b001])
        self.assertTrue(event.contains(0b101))
        self.assertFalse(event.contains(0b110))

    def test_events_on_a_support(self):
        ground = GroundSet.of_size(4)
        events = events_on(ground, 0b1010)
        self.assertEqual(len(events), 6)
        for event in events:
            self.assertTrue(all(member & ~0b1010 == 0 for member in event.family))


class TestCorrelationChecks(unittest.TestCase):
    """Test cases for negative association and BK checks."""

    def setUp(self):
        """Set up test fixtures."""
        self.kernel = transfer_current(complete_graph(4))

    def test_spanning_trees_are_negatively_associated(self):
        report = check_negative_association(self.kernel, (0b000011, 0b001100))
        self.assertTrue(report.passed)
        self.assertEqual(report.kind, THEOREM)
        self.assertEqual(report.details['event_pairs'], 36)
        self.assertIsNone(report.counterexample)

    def test_overlapping_split_rejected(self):
        with self.assertRaises(DomainError):
            check_negative_association(self.kernel, (0b011, 0b110))

    def test_conditional_negative_association(self):
        report = check_conditional_na(self.kernel, ConditionSpec(include=0b000001), (0b000110, 0b011000))
        self.assertTrue(report.passed)
        self.assertEqual(report.details['condition']['include'], ['v1v2'])

    def test_positive_correlation_is_caught(self):
        """Test that a tolerance below the true slack turns the check into a failure."""
        # independent sites have zero correlation, so a negative tolerance must fail
        report = check_negative_association(bernoulli(2, 0.5), (0b01, 0b10), tol=-1e-3)
        self.assertFalse(report.passed)
        self.assertEqual(report.counterexample['check'], 'correlation')
        self.assertAlmostEqual(reevaluate(report.counterexample), report.worst_margin)

    def test_bk_on_product_measure(self):
        report = bk_search(bernoulli(4, 0.5), trials=20, seed=1)
        self.assertEqual(report.kind, CONJECTURE)
        self.assertEqual(report.instances, 20)
        self.assertEqual(report.flags, [])
        self.assertTrue(report.passed)

    def test_disjoint_occurrence_of_one_element_twice(self):
        ground = GroundSet.of_size(3)
        first = up_closure(ground, 0b111, [0b001])
        self.assertFalse(disjoint_occurrence(first, first).any())
        second = up_closure(ground, 0b111, [0b010])
        occurrence = disjoint_occurrence(first, second)
        self.assertTrue(occurrence[0b011])
        self.assertFalse(occurrence[0b001])


class TestBoundsAndIdentities(unittest.TestCase):
    """Test cases for tail, concentration and projection checks."""

    def setUp(self):
        """Set up test fixtures."""
        self.subspace = random_projection(6, np.random.default_rng(13), rank=3)

    def test_tail_correlation_bound(self):
        report = check_tail_correlation(self.subspace, 0b000011, 0b110000)
        self.assertTrue(report.passed)
        self.assertGreaterEqual(report.details['bound'], report.details['max_correlation'])

    def test_tail_correlation_arguments(self):
        with self.assertRaises(DomainError):
            check_tail_correlation(self.subspace, 0, 0b110000)
        with self.assertRaises(DomainError):
            check_tail_correlation(self.subspace, 0b000011, 0b000110)
        with self.assertRaises(CapacityError):
            check_tail_correlation(self.subspace, 0b001111, 0b110000)

    def test_concentration(self):
        report = concentration_check(bernoulli(4, 0.5), 0b1111)
        self.assertTrue(report.passed)
        self.assertEqual(len(report.details['grid']), 8)
        with self.assertRaises(DomainError):
            concentration_check(bernoulli(4, 0.5), 0)

    def test_conditional_projection(self):
        report = check_conditional_projection(self.subspace, 0b000011)
        self.assertTrue(report.passed)
        self.assertLessEqual(report.details['max_error'], 1e-9)

    def test_commuting_domination(self):
        report = check_commuting_domination(trials=3, n=3, seed=4)
        self.assertTrue(report.passed)
        self.assertEqual(report.details['brute_force_disagreements'], 0)
        with self.assertRaises(CapacityError):
            check_commuting_domination(trials=1, n=7, seed=4)

    def test_entropy_concavity_is_reproducible(self):
        first = entropy_concavity_experiment(trials=5, n=3, seed=2)
        second = entropy_concavity_experiment(trials=5, n=3, seed=2)
        self.assertEqual(first.to_dict(), second.to_dict())
        self.assertEqual(first.kind, CONJECTURE)
        with self.assertRaises(DomainError):
            entropy_concavity_experiment(trials=5, n=3, ensemble='wishart')


class TestReevaluate(unittest.TestCase):
    """Test cases for recomputing counterexample payloads."""

    def test_correlation_payload(self):
        """Test the correlation margin of two single-element events."""
        payload = {
            'check': 'correlation',
            'kernel': {'labels': ['e1', 'e2'], 're': [[0.5, 0.3], [0.3, 0.5]]},
            'event1': {'support': ['e1'], 'members': [['e1']]},
            'event2': {'support': ['e2'], 'members': [['e2']]},
        }
        self.assertAlmostEqual(reevaluate(payload), 0.09)

    def test_unknown_payload(self):
        with self.assertRaises(DomainError):
            reevaluate({'check': 'nothing'})


class TestExperimentRunner(unittest.TestCase):
    """Test cases for registered suites."""

    def test_registered_suites(self):
        suites = ExperimentRunner.available_suites()
        self.assertEqual(len(suites), 19)
        self.assertIn('negative-association', suites)
        self.assertIn('bk', suites)
        for name in ('duality', 'conditioning', 'dilation', 'kirchhoff'):
            self.assertIn(name, suites)

    def test_foster_suite(self):
        report = ExperimentRunner(seed=5, trials=3).run('foster')
        self.assertTrue(report.passed)
        self.assertEqual(report.instances, 3)
        self.assertEqual(report.details['parameters'], {'n': 8, 'trials': 3})

    def test_same_seed_same_report(self):
        """Test that a suite report depends only on seed and parameters."""
        first = ExperimentRunner(seed=7, n=5, trials=6).run('negative-association').to_dict()
        second = ExperimentRunner(seed=7, n=5, trials=6).run('negative-association').to_dict()
        self.assertEqual(first, second)
        self.assertTrue(first['passed'])

    def test_overrides_ignore_unused_parameters(self):
        runner = ExperimentRunner(ensemble='toeplitz', draws=10)
        self.assertNotIn('ensemble', runner.parameters('foster'))
        self.assertEqual(runner.parameters('bk')['ensemble'], 'toeplitz')

    def test_complete_coupling_suite(self):
        report = ExperimentRunner(n=4).run('complete-coupling')
        self.assertTrue(report.passed)
        self.assertFalse(report.details['gram_schmidt_control_feasible'])

    def test_complete_coupling_suite_needs_an_infeasible_control(self):
        feasible = FeasibilityResult(True, None, 0.0, {'variables': 24})
        with mock.patch('determinantal_lab.core.experiments.complete_coupling', return_value=feasible):
            report = ExperimentRunner(n=2).run('complete-coupling')
        self.assertFalse(report.passed)
        self.assertTrue(report.details['gram_schmidt_control_feasible'])
        self.assertEqual(report.counterexample, {'check': 'gram-schmidt-control', 'instance': 1})

    def test_union_suite_fails_when_supports_disagree(self):
        """Test that a disjoint witness is not enough when the unrestricted LP disagrees."""
        disagreeing = FeasibilityResult(True, None, 0.0, {'non_disjoint_mass': 0.0, 'supports_agree': False})
        with mock.patch('determinantal_lab.core.experiments.find_disjoint_union_coupling',
                        return_value=disagreeing):
            report = ExperimentRunner(n=4, trials=2).run('union-coupling')
        self.assertFalse(report.passed)
        self.assertEqual(report.instances, 2)

    def test_entropy_suite_covers_toeplitz_pairs(self):
        """Test that the default entropy run adds Toeplitz pairs on two more sites."""
        self.assertEqual(ExperimentRunner().parameters('entropy-concavity'),
                         {'n': 6, 'trials': 1000, 'ensemble': None})
        report = ExperimentRunner(seed=4, n=6, trials=10).run('entropy-concavity')
        self.assertEqual(report.kind, CONJECTURE)
        self.assertEqual(report.instances, 12)
        runs = report.details['runs']
        self.assertEqual((runs['contraction']['n'], runs['contraction']['pairs']), (6, 10))
        self.assertEqual((runs['toeplitz']['n'], runs['toeplitz']['pairs']), (8, 2))

        single = ExperimentRunner(seed=4, n=3, trials=5, ensemble='toeplitz').run('entropy-concavity')
        self.assertEqual(single.instances, 5)
        self.assertEqual(single.details['ensemble'], 'toeplitz')

    def test_duality_suite(self):
        report = ExperimentRunner(seed=2, n=4, trials=6).run('duality')
        self.assertTrue(report.passed)
        self.assertEqual(report.instances, 15)

    def test_conditioning_suite(self):
        """Test Schur, subspace and two-step conditioning on the battery and random kernels."""
        report = ExperimentRunner(seed=2, n=4, trials=3).run('conditioning')
        self.assertTrue(report.passed)
        self.assertEqual(report.instances, 12)
        self.assertGreaterEqual(report.worst_margin, 0.0)

    def test_dilation_suite(self):
        report = ExperimentRunner(seed=2, n=3, trials=6).run('dilation')
        self.assertTrue(report.passed)
        self.assertEqual(report.instances, 15)

    def test_kirchhoff_suite(self):
        """Test expected and conditioned Kirchhoff vectors on K3, K4 and random projections."""
        report = ExperimentRunner(seed=2, n=6, trials=4).run('kirchhoff')
        self.assertTrue(report.passed)
        self.assertEqual(report.instances, 3 + 6 + 4 + 3 * 2 * 2 + 6 * 2 * 5)

    def test_unknown_suite(self):
        with self.assertRaises(DomainError):
            ExperimentRunner().run('no-such-suite')

    def test_renewal_needs_room(self):
        with self.assertRaises(DomainError):
            ExperimentRunner(n=10, draws=10).run('renewal')

    def test_merge_keeps_first_failure(self):
        reports = [
            CheckReport('demo', THEOREM, 1, 0.1, True),
            CheckReport('demo', THEOREM, 1, -0.5, False, counterexample={'check': 'demo'}),
        ]
        merged = merge_reports('demo', THEOREM, reports, seed=3)
        self.assertFalse(merged.passed)
        self.assertEqual(merged.worst_margin, -0.5)
        self.assertEqual(merged.counterexample, {'check': 'demo', 'instance': 1})
        self.assertEqual(merged.details['margins'], [0.1, -0.5])


if __name__ == '__main__':
    unittest.main()
