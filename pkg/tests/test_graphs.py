"""
Unit tests for spanning-tree kernels and Kirchhoff vectors.
"""

import unittest
import sys
import os

import numpy as np
from numpy.testing import assert_allclose

# Add the parent directory to the path so we can import the modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from determinantal_lab.core.errors import DomainError, SingularBaseError, StructuralError
from determinantal_lab.core.graphs import (Edge, Graph, complete_graph, conditioned_kirchhoff, contracted_deleted,
                                           cycle_graph, expected_kirchhoff, incidence_matrix, kirchhoff_vector,
                                           path_graph, random_connected_graph, spanning_trees, star_space,
                                           transfer_current, tree_count, weighted_laplacian, zeta_vector)
from determinantal_lab.core.measure import enumerate_distribution


def weighted_triangle() -> Graph:
    return Graph(('a', 'b', 'c'), (
        Edge('ab', 'a', 'b', 2.0),
        Edge('bc', 'b', 'c'),
        Edge('ca', 'c', 'a'),
    ))


class TestTransferCurrent(unittest.TestCase):
    """Test cases for tree counts and transfer current kernels."""

    def test_triangle(self):
        """Test K3: three trees, each edge present with probability 2/3."""
        graph = complete_graph(3)
        self.assertAlmostEqual(tree_count(graph), 3.0)
        assert_allclose(transfer_current(graph).diagonal(), 2 / 3, atol=1e-12)
        self.assertEqual(spanning_trees(graph), [0b011, 0b101, 0b110])

    def test_complete_graph_on_four_vertices(self):
        graph = complete_graph(4)
        self.assertAlmostEqual(tree_count(graph), 16.0)
        assert_allclose(transfer_current(graph).diagonal(), 0.5, atol=1e-12)

    def test_trees_are_uniform(self):
        """Test that the law of the transfer current is uniform on spanning trees."""
        graph = complete_graph(4)
        table = enumerate_distribution(transfer_current(graph))
        self.assertEqual(table.support(1e-12), spanning_trees(graph))
        for mask in spanning_trees(graph):
            self.assertAlmostEqual(table.mass[mask], 1 / 16)

    def test_weighted_triangle(self):
        """Test a weight-2 edge: five weighted trees, four containing it."""
        graph = weighted_triangle()
        self.assertAlmostEqual(tree_count(graph), 5.0)
        kernel = transfer_current(graph)
        self.assertAlmostEqual(kernel.diagonal()[0], 4 / 5)
        self.assertAlmostEqual(kernel.diagonal()[1], 3 / 5)

    def test_diagonal_sums_to_vertex_count_minus_one(self):
        graph = random_connected_graph(6, np.random.default_rng(4))
        self.assertTrue(graph.is_connected())
        self.assertAlmostEqual(float(np.sum(transfer_current(graph).diagonal())), 5.0)

    def test_tree_graphs(self):
        graph = path_graph(4)
        self.assertAlmostEqual(tree_count(graph), 1.0)
        assert_allclose(transfer_current(graph).entries, np.eye(3), atol=1e-12)

    def test_flipping_an_edge_flips_its_currents(self):
        graph = cycle_graph(4)
        original = transfer_current(graph).entries
        flipped = transfer_current(graph.flipped('c1')).entries
        signs = np.array([-1.0, 1.0, 1.0, 1.0])
        assert_allclose(flipped, original * np.outer(signs, signs), atol=1e-12)

    def test_laplacian_of_the_weighted_triangle(self):
        graph = weighted_triangle()
        incidence = incidence_matrix(graph)
        assert_allclose(incidence.sum(axis=0), 0.0)
        laplacian = weighted_laplacian(graph)
        assert_allclose(laplacian.sum(axis=1), 0.0, atol=1e-12)
        assert_allclose(np.diag(laplacian), [3.0, 3.0, 2.0])
        # matrix-tree theorem
        self.assertAlmostEqual(float(np.linalg.det(laplacian[1:, 1:])), 5.0)

    def test_disconnected_graph_rejected(self):
        graph = Graph(('a', 'b', 'c'), (Edge('ab', 'a', 'b'),))
        with self.assertRaises(DomainError) as context:
            tree_count(graph)
        self.assertIn('disconnected', str(context.exception))

    def test_invalid_graphs_rejected(self):
        with self.assertRaises(StructuralError):
            Graph(('a', 'b'), (Edge('ab', 'a', 'x'),))
        with self.assertRaises(DomainError):
            Graph(('a', 'b'), (Edge('ab', 'a', 'b', 0.0),))
        with self.assertRaises(StructuralError):
            Graph(('a', 'b'), (Edge('e', 'a', 'b'), Edge('e', 'b', 'a')))


class TestKirchhoffVectors(unittest.TestCase):
    """Test cases for ζ vectors and their expectations."""

    def setUp(self):
        """Set up test fixtures."""
        self.triangle = star_space(complete_graph(3))
        self.k4 = star_space(complete_graph(4))

    def test_zeta_of_a_base_element(self):
        """Test ζ^e_B = e when e lies in B."""
        zeta = zeta_vector(self.triangle, 'v1v2', 0b011)
        assert_allclose(zeta, [1, 0, 0], atol=1e-10)

    def test_kirchhoff_vector_routes_current(self):
        # unit current v1 -> v3 routed through the tree {v1v2, v2v3}
        coefficients = kirchhoff_vector(self.triangle, 'v1v3', 0b101)
        self.assertAlmostEqual(coefficients['v1v2'].real, 1.0)
        self.assertAlmostEqual(coefficients['v2v3'].real, 1.0)

    def test_dependent_set_rejected(self):
        with self.assertRaises(SingularBaseError):
            zeta_vector(self.triangle, 'v1v2', 0b111)

    def test_expected_kirchhoff_is_projection(self):
        """Test that E[ζ^e_B] equals P_H e."""
        expectation = expected_kirchhoff(self.k4, 'v1v2')
        assert_allclose(expectation, self.k4.projector()[:, 0], atol=1e-8)

    def test_contracted_deleted_rank(self):
        contracted = contracted_deleted(self.k4, 0b000011, 0b000001)
        self.assertEqual(contracted.rank, 2)

    def test_conditioned_kirchhoff(self):
        window, chosen = 0b000011, 0b000001
        vector = conditioned_kirchhoff(self.k4, window, chosen, 5)
        expected = contracted_deleted(self.k4, window, chosen).projector()[:, 5]
        assert_allclose(vector, expected, atol=1e-8)

    def test_conditioned_kirchhoff_arguments(self):
        with self.assertRaises(DomainError):
            conditioned_kirchhoff(self.k4, 0b000011, 0b000100, 5)
        with self.assertRaises(DomainError):
            conditioned_kirchhoff(self.k4, 0b000011, 0b000001, 0)
        for element in (-1, 6):
            with self.subTest(element=element), self.assertRaises(DomainError):
                conditioned_kirchhoff(self.k4, 0b000011, 0b000001, element)

    def test_conditioned_kirchhoff_on_the_triangle(self):
        """Test that forcing one edge of K3 leaves each other edge with marginal 1/2."""
        vector = conditioned_kirchhoff(self.triangle, 0b001, 0b001, 'v2v3')
        assert_allclose(np.abs(vector), [0.0, 0.5, 0.5], atol=1e-8)
        self.assertAlmostEqual(vector[2].real, 0.5)


if __name__ == '__main__':
    unittest.main()
