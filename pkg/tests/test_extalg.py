"""
Unit tests for the exterior-algebra oracle.
"""

import itertools
import unittest
import sys
import os

import numpy as np

# Add the parent directory to the path so we can import the modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from determinantal_lab.core.ensembles import random_projection
from determinantal_lab.core.errors import CapacityError, StructuralError
from determinantal_lab.core.extalg import (Multivector, exterior_projection, inner, interior,
                                           lifted_projection, oracle_cylinder, wedge, xi)
from determinantal_lab.core.ground import GroundSet
from determinantal_lab.core.kernels import Subspace, projection_kernel
from determinantal_lab.core.measure import cylinder_prob, enumerate_distribution


def random_multivector(ground: GroundSet, rng: np.random.Generator) -> Multivector:
    size = 1 << ground.size
    coefficients = rng.standard_normal(size) + 1j * rng.standard_normal(size)
    return Multivector(ground, dict(enumerate(coefficients)))


class TestMultivectors(unittest.TestCase):
    """Test cases for wedge and interior products."""

    def setUp(self):
        """Set up test fixtures."""
        self.ground = GroundSet.of_size(4)
        self.e = [Multivector.blade(self.ground, 1 << i) for i in range(4)]
        self.rng = np.random.default_rng(17)

    def test_wedge_anticommutes(self):
        """Test e1 ∧ e2 = -(e2 ∧ e1) and e1 ∧ e1 = 0."""
        forward = wedge(self.e[0], self.e[1])
        backward = wedge(self.e[1], self.e[0])
        self.assertEqual(forward.coefficient(0b11), 1)
        self.assertEqual(backward.coefficient(0b11), -1)
        self.assertEqual(wedge(self.e[0], self.e[0]).terms, {})

    def test_wedge_sign_of_interleaved_blades(self):
        # θ_{1,3} ∧ θ_{2} = -θ_{1,2,3}
        product = wedge(Multivector.blade(self.ground, 0b0101), self.e[1])
        self.assertEqual(product.coefficient(0b0111), -1)

    def test_vectors_wedge_to_determinant(self):
        matrix = self.rng.standard_normal((4, 4))
        columns = [Multivector.vector(self.ground, matrix[:, j]) for j in range(4)]
        product = wedge(wedge(columns[0], columns[1]), wedge(columns[2], columns[3]))
        self.assertAlmostEqual(product.coefficient(0b1111).real, np.linalg.det(matrix), places=10)

    def test_interior_is_adjoint_of_wedge(self):
        """Test <u ∨ v, w> = <u, w ∧ v> on random multivectors."""
        u = random_multivector(self.ground, self.rng)
        v = random_multivector(self.ground, self.rng)
        w = random_multivector(self.ground, self.rng)
        left = inner(interior(u, v), w)
        right = inner(u, wedge(w, v))
        self.assertAlmostEqual(abs(left - right), 0.0, places=9)

    def test_mismatched_grounds_rejected(self):
        other = Multivector.blade(GroundSet.of_size(3), 0b1)
        with self.assertRaises(StructuralError):
            wedge(self.e[0], other)

    def test_vector_length_checked(self):
        with self.assertRaises(StructuralError):
            Multivector.vector(self.ground, [1.0, 2.0])


class TestOracle(unittest.TestCase):
    """Test cases for ξ_H and the exterior cylinder formula."""

    def setUp(self):
        """Set up test fixtures."""
        self.subspace = random_projection(4, np.random.default_rng(23), rank=2)
        self.kernel = projection_kernel(self.subspace)

    def test_xi_is_a_unit_multivector(self):
        element = xi(self.subspace)
        self.assertAlmostEqual(element.norm(), 1.0)
        self.assertEqual(element.grades(), [2])

    def test_xi_coefficients_give_the_law(self):
        """Test that |<ξ_H, θ_B>|² is the mass of B."""
        element = xi(self.subspace)
        table = enumerate_distribution(self.kernel)
        for mask in range(1 << 4):
            self.assertAlmostEqual(abs(element.coefficient(mask)) ** 2, table.mass[mask], places=10)

    def test_oracle_matches_determinant(self):
        """Test the exterior route against the determinant for all disjoint pairs."""
        for include, exclude in itertools.product(range(16), repeat=2):
            if include & exclude:
                continue
            self.assertAlmostEqual(oracle_cylinder(self.subspace, include, exclude),
                                   cylinder_prob(self.kernel, include, exclude), places=9)

    def test_overlapping_cylinder_is_empty(self):
        self.assertEqual(oracle_cylinder(self.subspace, 0b11, 0b01), 0.0)

    def test_lifted_projection_matches_basis_projection(self):
        u = random_multivector(self.subspace.ground, np.random.default_rng(5))
        lifted = lifted_projection(self.subspace, u)
        projected = exterior_projection(self.subspace, u)
        self.assertAlmostEqual((lifted - projected).norm(), 0.0, places=9)

    def test_projection_fixes_xi(self):
        element = xi(self.subspace)
        self.assertAlmostEqual((lifted_projection(self.subspace, element) - element).norm(), 0.0, places=9)

    def test_capacity_limit(self):
        """Test that the oracle refuses ground sets of more than 12 elements."""
        large = Subspace.coordinate(GroundSet.of_size(13), 0b1)
        with self.assertRaises(CapacityError):
            oracle_cylinder(large, 0b1)


if __name__ == '__main__':
    unittest.main()
