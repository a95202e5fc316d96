"""
Unit tests for ground sets, kernels, the kernel zoo and random ensembles.
"""

import unittest
import sys
import os

import numpy as np
from numpy.testing import assert_allclose

# Add the parent directory to the path so we can import the modules
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '..'))

from determinantal_lab.core.ensembles import (battery, commuting_pair, nested_projections,
                                              orthogonal_decomposition, random_contraction,
                                              random_kernel, random_projection)
from determinantal_lab.core.errors import (DomainError, ImpossibleEventError, StructuralError,
                                           ValidationError)
from determinantal_lab.core.ground import GroundSet, indices_of, membership_bits, submasks
from determinantal_lab.core.kernels import (ConditionSpec, Kernel, Subspace, condition, dilate, dual,
                                            projection_kernel, reweight, subspace_condition, validate)
from determinantal_lab.core.graphs import complete_graph, star_space
from determinantal_lab.core.measure import cylinder_prob, enumerate_distribution, tv_distance
from determinantal_lab.core.zoo import (bernoulli, renewal_truncated, toeplitz_from_arc,
                                        toeplitz_from_symbol, zn_character, zn_character_subspace)


def two_site_kernel() -> Kernel:
    return Kernel(GroundSet.of_size(2), np.array([[0.5, 0.3], [0.3, 0.5]]))


class TestGroundSet(unittest.TestCase):
    """Test cases for ground sets and masks."""

    def test_duplicate_labels_rejected(self):
        with self.assertRaises(StructuralError):
            GroundSet(('a', 'b', 'a'))

    def test_mask_of_labels_and_indices(self):
        ground = GroundSet(('a', 'b', 'c'))
        self.assertEqual(ground.mask_of(['a', 'c']), 0b101)
        self.assertEqual(ground.mask_of([1]), 0b010)
        self.assertEqual(ground.labels_of(0b110), ['b', 'c'])

    def test_unknown_label_rejected(self):
        with self.assertRaises(StructuralError):
            GroundSet.of_size(3).mask_of(['e9'])

    def test_bit_helpers(self):
        self.assertEqual(indices_of(0b1011), [0, 1, 3])
        self.assertEqual(sorted(submasks(0b101)), [0, 1, 4, 5])
        bits = membership_bits(2)
        self.assertEqual(bits.tolist(), [[False, False], [True, False], [False, True], [True, True]])


class TestKernels(unittest.TestCase):
    """Test cases for kernel construction, validation and conditioning."""

    def test_non_square_entries_rejected(self):
        with self.assertRaises(StructuralError):
            Kernel(GroundSet.of_size(2), np.zeros((2, 3)))

    def test_validate_identity(self):
        report = validate(Kernel(GroundSet.of_size(3), np.eye(3)))
        self.assertTrue(report.passed)
        self.assertAlmostEqual(report.min_eigenvalue, 1.0)
        self.assertAlmostEqual(report.max_eigenvalue, 1.0)
        self.assertEqual(report.problems, ())

    def test_validate_reports_problems(self):
        not_hermitian = Kernel(GroundSet.of_size(2), np.array([[0.5, 0.4], [0.0, 0.5]]))
        report = validate(not_hermitian)
        self.assertFalse(report.passed)
        self.assertTrue(any('Hermitian' in problem for problem in report.problems))

        too_large = Kernel(GroundSet.of_size(2), np.array([[1.0, 0.5], [0.5, 1.0]]))
        report = validate(too_large)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.max_eigenvalue, 1.5)

    def test_dual_swaps_inclusion_and_exclusion(self):
        kernel = battery()[5][1]
        complement = dual(kernel)
        full = kernel.ground.full_mask
        for include in range(1 << kernel.size):
            self.assertAlmostEqual(cylinder_prob(complement, include),
                                   cylinder_prob(kernel, 0, include), places=10)
            self.assertAlmostEqual(cylinder_prob(complement, include, full & ~include),
                                   cylinder_prob(kernel, full & ~include, include), places=10)

    def test_condition_two_sites(self):
        kernel = two_site_kernel()
        included = condition(kernel, ConditionSpec(include=0b01))
        self.assertEqual(included.ground.labels, ('e2',))
        self.assertAlmostEqual(included.entries[0, 0].real, 0.32)

        excluded = condition(kernel, ConditionSpec(exclude=0b01))
        self.assertAlmostEqual(excluded.entries[0, 0].real, 0.68)

    def test_condition_matches_enumeration(self):
        for name, kernel in battery():
            with self.subTest(kernel=name):
                given = ConditionSpec(include=0b01, exclude=0b10)
                conditioned = enumerate_distribution(condition(kernel, given))
                expected = enumerate_distribution(kernel).conditional(given.include, given.exclude)
                assert_allclose(conditioned.mass, expected.mass, atol=1e-9)

    def test_condition_on_impossible_event(self):
        with self.assertRaises(ImpossibleEventError):
            condition(bernoulli(2, 0.0), ConditionSpec(include=0b01))

    def test_overlapping_condition_rejected(self):
        with self.assertRaises(DomainError):
            ConditionSpec(include=0b11, exclude=0b01)

    def test_subspace_condition_matches_schur_route(self):
        rng = np.random.default_rng(3)
        subspace = random_projection(5, rng, rank=2)
        given = ConditionSpec(include=0b00001, exclude=0b00100)
        conditioned = subspace_condition(subspace, given)
        schur = condition(projection_kernel(subspace), given)

        projector = conditioned.projector()
        rest = [1, 3, 4]
        assert_allclose(projector[np.ix_(rest, rest)], schur.entries, atol=1e-9)
        self.assertAlmostEqual(projector[0, 0].real, 1.0)
        self.assertAlmostEqual(abs(projector[2, 2]), 0.0)
        self.assertEqual(conditioned.rank, subspace.rank)

    def test_dilate_compresses_to_kernel(self):
        kernel = battery()[5][1]
        dilation = dilate(kernel)
        n = kernel.size
        self.assertEqual(dilation.ground.size, 2 * n)
        self.assertEqual(dilation.rank, n)
        self.assertTrue(all(label.endswith('^') for label in dilation.ground.labels[n:]))
        assert_allclose(dilation.projector()[:n, :n], kernel.entries, atol=1e-9)

    def test_reweight_by_constant_keeps_subspace(self):
        rng = np.random.default_rng(11)
        subspace = random_projection(4, rng, rank=2)
        assert_allclose(reweight(subspace, [3.0] * 4).projector(), subspace.projector(), atol=1e-10)
        with self.assertRaises(DomainError):
            reweight(subspace, [1.0, 0.0, 1.0, 1.0])

    def test_dual_is_an_involution(self):
        for name, kernel in battery():
            with self.subTest(kernel=name):
                assert_allclose(dual(dual(kernel)).entries, kernel.entries, rtol=0, atol=1e-15)

    def test_principal_submatrices_are_valid(self):
        """Test that every restriction of a battery kernel is a positive contraction."""
        for name, kernel in battery():
            for mask in range(1, 1 << kernel.size):
                with self.subTest(kernel=name, mask=mask):
                    restricted = kernel.restrict(indices_of(mask))
                    self.assertTrue(validate(restricted).passed)
                    self.assertEqual(restricted.size, len(indices_of(mask)))

    def test_conditioning_in_two_steps(self):
        """Test that conditioning on A and then on B equals conditioning on both at once."""
        rng = np.random.default_rng(8)
        subspace = random_projection(5, rng, rank=3)
        include, exclude = ConditionSpec(include=0b00001), ConditionSpec(exclude=0b00100)
        both = ConditionSpec(include=0b00001, exclude=0b00100)
        once = subspace_condition(subspace, both).projector()
        for first, second in ((include, exclude), (exclude, include)):
            twice = subspace_condition(subspace_condition(subspace, first), second)
            assert_allclose(twice.projector(), once, atol=1e-8)

        kernel = projection_kernel(subspace)
        step = condition(kernel, include)
        stepped = condition(step, ConditionSpec.from_labels(step.ground, exclude=['e3']))
        self.assertEqual(stepped.ground.labels, ('e2', 'e4', 'e5'))
        assert_allclose(stepped.entries, condition(kernel, both).entries, atol=1e-9)

    def test_dilation_marginal_law(self):
        """Test that the dilated projection measure restricted to E is P^Q."""
        rng = np.random.default_rng(17)
        for size in (1, 2, 3, 4, 5):
            for ensemble in ('contraction', 'projection', 'toeplitz'):
                with self.subTest(size=size, ensemble=ensemble):
                    kernel = random_kernel(ensemble, size, rng)
                    dilation = enumerate_distribution(projection_kernel(dilate(kernel)))
                    marginal = dilation.pushforward(range(size))
                    self.assertLessEqual(tv_distance(marginal, enumerate_distribution(kernel)), 1e-8)

    def test_dilation_of_half_identity(self):
        dilation = dilate(bernoulli(1, 0.5))
        assert_allclose(dilation.projector(), [[0.5, 0.5], [0.5, 0.5]], atol=1e-12)
        marginal = enumerate_distribution(projection_kernel(dilation)).pushforward([0])
        assert_allclose(marginal.mass, [0.5, 0.5], atol=1e-12)

    def test_reweight_one_triangle_edge(self):
        """Test that doubling one edge of K3 gives tree probabilities 2/5, 2/5, 1/5."""
        triangle = star_space(complete_graph(3))
        law = enumerate_distribution(projection_kernel(reweight(triangle, {'v1v2': 2.0})))
        self.assertAlmostEqual(law.probability(0b011), 0.4)
        self.assertAlmostEqual(law.probability(0b101), 0.4)
        self.assertAlmostEqual(law.probability(0b110), 0.2)
        self.assertAlmostEqual(sum(law.probability(mask) for mask in (0b011, 0b101, 0b110)), 1.0)

    def test_non_orthonormal_subspace_rejected(self):
        with self.assertRaises(ValidationError):
            Subspace(GroundSet.of_size(2), np.array([[1.0], [1.0]]))


class TestZoo(unittest.TestCase):
    """Test cases for the named kernel families."""

    def test_bernoulli(self):
        kernel = bernoulli(3, 0.3)
        assert_allclose(kernel.entries, 0.3 * np.eye(3))
        with self.assertRaises(DomainError):
            bernoulli(3, 1.5)

    def test_renewal_diagonal(self):
        a = 0.4
        kernel = renewal_truncated(6, a)
        assert_allclose(kernel.diagonal().real, (1 - a) / (1 + a))
        self.assertTrue(validate(kernel).passed)
        with self.assertRaises(DomainError):
            renewal_truncated(6, 1.0)

    def test_zn_character_is_projection(self):
        kernel = zn_character(4, [0, 1])
        q = np.array(kernel.entries)
        assert_allclose(q @ q, q, atol=1e-12)
        self.assertAlmostEqual(np.trace(q).real, 2.0)
        with self.assertRaises(DomainError):
            zn_character(4, [4])

    def test_zn_subspace_matches_kernel(self):
        subspace = zn_character_subspace(5, [1, 3])
        self.assertEqual(subspace.rank, 2)
        assert_allclose(projection_kernel(subspace).entries, zn_character(5, [1, 3]).entries, atol=1e-12)

    def test_toeplitz_symbol_range(self):
        kernel = toeplitz_from_symbol(5, [0.5, 0.2])
        self.assertTrue(validate(kernel).passed)
        self.assertAlmostEqual(kernel.entries[0, 1].real, 0.2)
        with self.assertRaises(DomainError):
            toeplitz_from_symbol(5, [0.5, 0.3])

    def test_arc_kernel(self):
        kernel = toeplitz_from_arc(8, 0.0, 0.5)
        assert_allclose(kernel.diagonal().real, 0.5)
        with self.assertRaises(DomainError):
            toeplitz_from_arc(8, 0.3, 0.3)


class TestEnsembles(unittest.TestCase):
    """Test cases for seeded random kernels."""

    def setUp(self):
        """Set up test fixtures."""
        self.rng = np.random.default_rng(2024)

    def test_random_kernels_are_valid(self):
        for ensemble in ('projection', 'contraction', 'toeplitz'):
            with self.subTest(ensemble=ensemble):
                self.assertTrue(validate(random_kernel(ensemble, 5, self.rng)).passed)
        with self.assertRaises(DomainError):
            random_kernel('wishart', 5, self.rng)

    def test_random_contraction_reproducible(self):
        first = random_contraction(4, np.random.default_rng(5))
        second = random_contraction(4, np.random.default_rng(5))
        assert_allclose(first.entries, second.entries)

    def test_nested_projections(self):
        inner, outer = nested_projections(5, self.rng)
        self.assertLessEqual(inner.rank, outer.rank)
        assert_allclose(outer.projector() @ inner.projector(), inner.projector(), atol=1e-10)

    def test_orthogonal_decomposition(self):
        first, second = orthogonal_decomposition(5, self.rng, full=True)
        self.assertEqual(first.rank + second.rank, 5)
        assert_allclose(first.basis.conj().T @ second.basis, 0, atol=1e-10)

    def test_commuting_pair_is_ordered(self):
        lower, upper = commuting_pair(4, self.rng)
        q1, q2 = np.array(lower.entries), np.array(upper.entries)
        assert_allclose(q1 @ q2, q2 @ q1, atol=1e-10)
        self.assertGreaterEqual(np.linalg.eigvalsh(q2 - q1).min(), -1e-10)

    def test_battery_is_valid(self):
        for name, kernel in battery():
            with self.subTest(kernel=name):
                self.assertTrue(validate(kernel).passed)
                self.assertLessEqual(kernel.size, 6)


if __name__ == '__main__':
    unittest.main()
