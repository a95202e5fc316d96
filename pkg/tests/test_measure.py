"""
Unit tests for exact probabilities, enumeration and entropy.
"""

import math
import unittest
import sys
import os

import numpy as np
from numpy.testing import assert_allclose

# Add the parent directory to the path so we can import the modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from determinantal_lab.core.ensembles import battery
from determinantal_lab.core.errors import CapacityError, DomainError, ValidationError
from determinantal_lab.core.graphs import complete_graph, transfer_current
from determinantal_lab.core.ground import GroundSet
from determinantal_lab.core.kernels import dual, projection_kernel
from determinantal_lab.core.measure import (CoordinatizationMatrix, DistributionTable, base_prob_from_matrix,
                                            cylinder_prob, entropy, enumerate_distribution,
                                            marginal_count_stats, tv_distance)
from determinantal_lab.core.zoo import bernoulli


class TestCylinderProbabilities(unittest.TestCase):
    """Test cases for single-determinant cylinder probabilities."""

    def setUp(self):
        """Set up test fixtures."""
        self.kernel = transfer_current(complete_graph(4))
        self.table = enumerate_distribution(self.kernel)

    def test_empty_cylinder_is_certain(self):
        """Test that the empty event has probability one."""
        self.assertEqual(cylinder_prob(self.kernel, 0, 0), 1.0)

    def test_cylinder_matches_enumerated_sum(self):
        """Test cylinders against sums of elementary masses."""
        masks = np.arange(1 << self.kernel.size)
        for include, exclude in [(0b000001, 0), (0b000011, 0b100000), (0, 0b000111), (0b100001, 0b010010)]:
            inside = ((masks & include) == include) & ((masks & exclude) == 0)
            self.assertAlmostEqual(cylinder_prob(self.kernel, include, exclude),
                                   float(self.table.mass[inside].sum()), places=10)

    def test_overlap_rejected(self):
        with self.assertRaises(DomainError):
            cylinder_prob(self.kernel, 0b11, 0b10)

    def test_diagonal_is_marginal(self):
        assert_allclose(self.table.marginals(), self.kernel.diagonal(), atol=1e-12)
        assert_allclose(self.table.marginals(), 0.5, atol=1e-12)


class TestEnumeration(unittest.TestCase):
    """Test cases for the full law of the random set."""

    def test_bernoulli_masses(self):
        """Test that a product measure enumerates to products."""
        table = enumerate_distribution(bernoulli(2, 0.3))
        assert_allclose(table.mass, [0.49, 0.21, 0.21, 0.09], atol=1e-12)

    def test_masses_sum_to_one_over_battery(self):
        for name, kernel in battery():
            with self.subTest(kernel=name):
                self.assertAlmostEqual(float(enumerate_distribution(kernel).mass.sum()), 1.0, places=10)

    def test_projection_law_lives_on_bases(self):
        """Test that a rank-r projection only charges sets of size r."""
        table = enumerate_distribution(transfer_current(complete_graph(4)))
        for mask in table.support(1e-12):
            self.assertEqual(bin(mask).count('1'), 3)
        self.assertEqual(len(table.support(1e-12)), 16)

    def test_complement_pushforward_is_dual(self):
        kernel = battery()[5][1]
        pushed = enumerate_distribution(kernel).complement_pushforward()
        assert_allclose(pushed.mass, enumerate_distribution(dual(kernel)).mass, atol=1e-10)

    def test_pushforward_to_one_element(self):
        table = enumerate_distribution(bernoulli(3, 0.3))
        single = table.pushforward([2])
        self.assertEqual(single.ground.labels, ('e3',))
        assert_allclose(single.mass, [0.7, 0.3], atol=1e-12)

    def test_conditional_table(self):
        table = enumerate_distribution(bernoulli(3, 0.3))
        conditioned = table.conditional(0b001, 0b010)
        self.assertEqual(conditioned.ground.labels, ('e3',))
        assert_allclose(conditioned.mass, [0.7, 0.3], atol=1e-12)
        with self.assertRaises(DomainError):
            enumerate_distribution(bernoulli(2, 0.0)).conditional(0b01, 0)

    def test_capacity_limit(self):
        """Test that more than 20 elements cannot be enumerated."""
        with self.assertRaises(CapacityError):
            enumerate_distribution(bernoulli(21, 0.5))

    def test_table_rejects_bad_total(self):
        with self.assertRaises(ValidationError):
            DistributionTable(GroundSet.of_size(1), np.array([0.5, 0.4]))

    def test_csv_rendering(self):
        """Test the CSV header and one row per subset."""
        lines = enumerate_distribution(bernoulli(2, 0.5)).to_csv().splitlines()
        self.assertEqual(lines[0], 'mask,subset,probability')
        self.assertEqual(len(lines), 5)
        self.assertTrue(lines[4].startswith('3,"e1,e2",0.25'))

    def test_tv_distance(self):
        first = enumerate_distribution(bernoulli(2, 0.3))
        second = enumerate_distribution(bernoulli(2, 0.5))
        self.assertEqual(tv_distance(first, first), 0.0)
        self.assertAlmostEqual(tv_distance(first, second), 0.5 * (0.24 + 0.04 + 0.04 + 0.16))


class TestCoordinatization(unittest.TestCase):
    """Test cases for laws given by a coordinatizing matrix."""

    def setUp(self):
        """Set up test fixtures."""
        self.matrix = CoordinatizationMatrix(GroundSet.of_size(3), np.array([[1, 0, 1], [0, 1, 1]]))

    def test_every_base_is_equally_likely(self):
        for base in (0b011, 0b101, 0b110):
            self.assertAlmostEqual(base_prob_from_matrix(self.matrix, base), 1 / 3)
        self.assertEqual(base_prob_from_matrix(self.matrix, 0b111), 0.0)

    def test_row_space_gives_the_same_law(self):
        table = enumerate_distribution(projection_kernel(self.matrix.row_space()))
        for base in (0b011, 0b101, 0b110):
            self.assertAlmostEqual(table.mass[base], base_prob_from_matrix(self.matrix, base), places=10)

    def test_rank_deficient_rows_rejected(self):
        with self.assertRaises(ValidationError):
            CoordinatizationMatrix(GroundSet.of_size(3), np.array([[1, 0, 1], [2, 0, 2]]))


class TestEntropyAndCounts(unittest.TestCase):
    """Test cases for entropy and marginal count statistics."""

    def test_entropy_of_fair_coins(self):
        self.assertAlmostEqual(entropy(bernoulli(2, 0.5)), 2 * math.log(2))

    def test_entropy_of_deterministic_set(self):
        self.assertAlmostEqual(entropy(bernoulli(3, 1.0)), 0.0)

    def test_count_law_is_binomial(self):
        """Test that |S ∩ A| under a product measure is binomial."""
        stats = marginal_count_stats(bernoulli(4, 0.5), 0b1111)
        self.assertAlmostEqual(stats.mean, 2.0)
        assert_allclose(stats.pmf, np.array([1, 4, 6, 4, 1]) / 16, atol=1e-12)
        self.assertEqual(stats.size, 4)
        self.assertAlmostEqual(stats.tail(2.0), 2 / 16)
        self.assertAlmostEqual(stats.tail(0.0), 1.0)


if __name__ == '__main__':
    unittest.main()
