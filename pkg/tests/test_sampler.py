"""
Unit tests for the exact sequential sampler and its statistics.
"""

import math
import unittest
import sys
import os

import numpy as np
from numpy.testing import assert_allclose

# Add the parent directory to the path so we can import the modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from determinantal_lab.core.errors import DomainError, StructuralError
from determinantal_lab.core.graphs import complete_graph, spanning_trees, transfer_current
from determinantal_lab.core.ground import GroundSet
from determinantal_lab.core.kernels import Kernel
from determinantal_lab.core.measure import DistributionTable, enumerate_distribution, tv_distance
from determinantal_lab.core.sampler import (SampleRun, chisquare_gof, draw_generator, empirical_table,
                                            gap_statistics, sample_many, sample_one, site_frequencies)
from determinantal_lab.core.zoo import bernoulli, renewal_gap_pmf, renewal_truncated


class TestSampler(unittest.TestCase):
    """Test cases for seeded draws."""

    def setUp(self):
        """Set up test fixtures."""
        self.graph = complete_graph(3)
        self.kernel = transfer_current(self.graph)

    def test_same_seed_same_draws(self):
        """Test bit-exact replay for a fixed seed."""
        first = sample_many(self.kernel, 50, seed=3)
        second = sample_many(self.kernel, 50, seed=3)
        self.assertEqual(first.outcomes, second.outcomes)
        self.assertNotEqual(first.outcomes, sample_many(self.kernel, 50, seed=4).outcomes)

    def test_prefix_stability(self):
        """Test that draw i does not depend on how many draws are taken."""
        long_run = sample_many(self.kernel, 40, seed=11)
        short_run = sample_many(self.kernel, 15, seed=11)
        self.assertEqual(long_run.outcomes[:15], short_run.outcomes)

    def test_sample_one_matches_sample_many(self):
        run = sample_many(self.kernel, 5, seed=9)
        self.assertEqual(sample_one(self.kernel, draw_generator(9, 3)), run.outcomes[3])

    def test_deterministic_kernels(self):
        identity = Kernel(GroundSet.of_size(3), np.eye(3))
        self.assertEqual(set(sample_many(identity, 20, seed=1).outcomes), {0b111})
        self.assertEqual(set(sample_many(bernoulli(3, 0.0), 20, seed=1).outcomes), {0})

    def test_draws_are_spanning_trees(self):
        trees = set(spanning_trees(self.graph))
        run = sample_many(self.kernel, 200, seed=5, randomize_order=True, debug=True)
        self.assertTrue(set(run.outcomes) <= trees)
        self.assertTrue(run.summary()['randomized_order'])

    def test_empirical_law_is_close(self):
        """Test the empirical law of K3 spanning trees against enumeration."""
        run = sample_many(self.kernel, 20000, seed=2024)
        empirical = empirical_table(run)
        exact = enumerate_distribution(self.kernel)
        self.assertLess(tv_distance(empirical, exact), 0.02)
        _, _, p_value = chisquare_gof(empirical, exact)
        self.assertGreater(p_value, 1e-4)

    def test_fixed_visit_order(self):
        run = sample_many(self.kernel, 30, seed=8, order=[2, 0, 1])
        self.assertEqual(run.visit_order, (2, 0, 1))
        self.assertTrue(set(run.outcomes) <= set(spanning_trees(self.graph)))

    def test_invalid_arguments(self):
        with self.assertRaises(DomainError):
            sample_many(self.kernel, 0)
        with self.assertRaises(StructuralError):
            sample_many(self.kernel, 5, order=[0, 0, 1])
        with self.assertRaises(DomainError):
            draw_generator(-1, 0)

    def test_output_lines(self):
        run = sample_many(Kernel(GroundSet.of_size(2), np.eye(2)), 2, seed=1)
        self.assertEqual(run.to_lines(), ['e1,e2', 'e1,e2'])
        self.assertEqual(list(run.to_frame().columns), ['draw', 'mask', 'subset'])


class TestSampleStatistics(unittest.TestCase):
    """Test cases for goodness of fit and renewal statistics."""

    def test_chisquare_on_exact_counts(self):
        exact = enumerate_distribution(bernoulli(2, 0.5))
        statistic, dof, p_value = chisquare_gof(exact, exact, count=1000)
        self.assertAlmostEqual(statistic, 0.0)
        self.assertEqual(dof, 3)
        self.assertAlmostEqual(p_value, 1.0)

    def test_chisquare_statistic_and_tail(self):
        exact = DistributionTable(GroundSet.of_size(1), np.array([0.5, 0.5]))
        empirical = DistributionTable(GroundSet.of_size(1), np.array([0.4, 0.6]), sample_count=100)
        statistic, dof, p_value = chisquare_gof(empirical, exact)
        self.assertAlmostEqual(statistic, 4.0)
        self.assertEqual(dof, 1)
        self.assertAlmostEqual(p_value, math.erfc(math.sqrt(2.0)))

    def test_chisquare_needs_a_count(self):
        exact = enumerate_distribution(bernoulli(2, 0.5))
        with self.assertRaises(DomainError):
            chisquare_gof(exact, exact)

    def test_gap_statistics(self):
        """Test gaps on a hand-made run with points at 0, 3 and 5."""
        run = SampleRun(GroundSet.of_size(6), 0, 1, (0b101001,), 0.0)
        self.assertEqual(gap_statistics(run, 0, 6), (2.5, 2))
        self.assertEqual(gap_statistics(run, 1, 4), (2.0, 1))
        mean, observed = gap_statistics(run, 5, 6)
        self.assertTrue(math.isnan(mean))
        self.assertEqual(observed, 0)

    def test_renewal_gap_law_sums_to_one(self):
        total = sum(renewal_gap_pmf(0.4, gap) for gap in range(1, 400))
        self.assertAlmostEqual(total, 1.0)
        self.assertEqual(renewal_gap_pmf(0.4, 0), 0.0)

    def test_renewal_draws(self):
        """Test site frequencies and interior mean gaps of renewal draws."""
        a = 0.5
        run = sample_many(renewal_truncated(30, a), 2000, seed=31)
        assert_allclose(site_frequencies(run), (1 - a) / (1 + a), atol=0.05)
        mean_gap, observed = gap_statistics(run, 10, 20)
        self.assertGreater(observed, 1000)
        self.assertAlmostEqual(mean_gap, (1 + a) / (1 - a), delta=0.2)


if __name__ == '__main__':
    unittest.main()
