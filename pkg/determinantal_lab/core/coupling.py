"""
Coupling existence and construction.

Monotone couplings come from a max-flow on the subset lattice; disjoint
union couplings and complete couplings come from phase-1 linear programs.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import networkx as nx
import numpy as np
import scipy.sparse
from networkx.algorithms.flow import edmonds_karp
from scipy.optimize import linprog

from .errors import CapacityError, DomainError, InternalConsistencyError, StructuralError
from .events import local_indicator_matrix
from .ground import GroundSet, indices_of, mask_sizes, popcount
from .kernels import Subspace, projection_kernel
from .measure import DistributionTable, enumerate_distribution
from .zoo import character_matrix, zn_ground
from ..utils import linalg

logger = logging.getLogger(__name__)

FLOW_SCALE = 10 ** 15
FLOW_TOL = 1e-9
LP_TOL = 1e-7
PRUNE_CUTOFF = 1e-12
DOMINATION_GROUND_LIMIT = 12
UNION_GROUND_LIMIT = 9
UNRESTRICTED_CONFIRM_LIMIT = 5
COMPLETE_GROUND_LIMIT = 6
BRUTE_FORCE_LIMIT = 4


@dataclass(frozen=True, eq=False)
class CouplingTable:
    """Joint law of a pair of random subsets of the same ground set."""

    ground: GroundSet
    mass: Dict[Tuple[int, int], float]

    def __post_init__(self):
        self.ground.require_enumerable()
        cleaned = {}
        for (first, second), value in dict(self.mass).items():
            if value < -LP_TOL:
                raise StructuralError(f"Negative coupling mass {value:.3e}")
            if value > 0:
                cleaned[(int(first), int(second))] = float(value)
        total = sum(cleaned.values())
        if abs(total - 1) > LP_TOL:
            raise StructuralError(f"Coupling masses sum to {total:.10g}, not 1")
        object.__setattr__(self, 'mass', cleaned)

    def _pushforward(self, key) -> np.ndarray:
        law = np.zeros(1 << self.ground.size)
        for pair, value in self.mass.items():
            law[key(pair)] += value
        return law

    def first_marginal(self) -> np.ndarray:
        return self._pushforward(lambda pair: pair[0])

    def second_marginal(self) -> np.ndarray:
        return self._pushforward(lambda pair: pair[1])

    def union_marginal(self) -> np.ndarray:
        return self._pushforward(lambda pair: pair[0] | pair[1])

    def non_monotone_mass(self) -> float:
        """Mass on pairs (A1, A2) with A1 not contained in A2."""
        return sum(v for (a, b), v in self.mass.items() if a & ~b)

    def non_disjoint_mass(self) -> float:
        return sum(v for (a, b), v in self.mass.items() if a & b)

    def difference_law(self) -> Dict[int, float]:
        """Law of A2 ∖ A1."""
        law: Dict[int, float] = {}
        for (a, b), value in self.mass.items():
            law[b & ~a] = law.get(b & ~a, 0.0) + value
        return law

    def difference_size_law(self) -> List[float]:
        """Law of |A2 ∖ A1|."""
        sizes = [0.0] * (self.ground.size + 1)
        for mask, value in self.difference_law().items():
            sizes[popcount(mask)] += value
        return sizes

    def to_dict(self) -> Dict:
        return {
            'labels': list(self.ground.labels),
            'pairs': [
                {'first': self.ground.labels_of(a), 'second': self.ground.labels_of(b), 'mass': v}
                for (a, b), v in sorted(self.mass.items())
            ],
        }


@dataclass(frozen=True, eq=False)
class PermutationCoupling:
    """Law of a random bijection from line indices to ground elements."""

    ground: GroundSet
    mass: Dict[Tuple[int, ...], float]

    def image_law(self, lines: int) -> np.ndarray:
        """Law of σ(J) for the mask J of line indices."""
        law = np.zeros(1 << self.ground.size)
        for permutation, value in self.mass.items():
            law[_image(permutation, lines)] += value
        return law

    def to_dict(self) -> Dict:
        return {
            'labels': list(self.ground.labels),
            'bijections': [
                {'images': [self.ground.labels[e] for e in permutation], 'mass': value}
                for permutation, value in sorted(self.mass.items())
            ],
        }


@dataclass
class FeasibilityResult:
    """Verdict of a coupling search."""

    feasible: bool
    witness: Optional[Union[CouplingTable, PermutationCoupling]]
    max_violation: float
    details: Dict = field(default_factory=dict)

    def to_dict(self, include_witness: bool = True) -> Dict:
        payload = {
            'feasible': self.feasible,
            'max_violation': self.max_violation,
            'details': self.details,
        }
        if include_witness:
            payload['witness'] = self.witness.to_dict() if self.witness is not None else None
        return payload


def _same_ground(*tables: DistributionTable) -> GroundSet:
    ground = tables[0].ground
    for table in tables[1:]:
        if table.ground != ground:
            raise StructuralError("Distributions live on different ground sets")
    return ground


def check_domination(p: DistributionTable, q: DistributionTable) -> FeasibilityResult:
    """
    Decide whether p is stochastically dominated by q by a max-flow on
    comparable pairs, and return the flow as a monotone coupling.

    Raises:
        CapacityError: If the ground set exceeds 12 elements
    """
    ground = _same_ground(p, q)
    if ground.size > DOMINATION_GROUND_LIMIT:
        raise CapacityError(f"check_domination is limited to {DOMINATION_GROUND_LIMIT} elements")

    lower = p.support(PRUNE_CUTOFF)
    upper = q.support(PRUNE_CUTOFF)
    network = nx.DiGraph()
    source_total = 0
    for a in lower:
        capacity = int(round(p.mass[a] * FLOW_SCALE))
        source_total += capacity
        network.add_edge('source', ('lower', a), capacity=capacity)
    for b in upper:
        network.add_edge(('upper', b), 'sink', capacity=int(round(q.mass[b] * FLOW_SCALE)))
    arcs = 0
    for a in lower:
        for b in upper:
            if not a & ~b:
                # no capacity attribute: unbounded arc
                network.add_edge(('lower', a), ('upper', b))
                arcs += 1
    logger.debug("Domination network: %d lower, %d upper, %d comparable arcs", len(lower), len(upper), arcs)

    flow_value, flow = nx.maximum_flow(network, 'source', 'sink', flow_func=edmonds_karp)
    deficit = (source_total - flow_value) / FLOW_SCALE
    feasible = deficit <= FLOW_TOL
    details = {'lower_support': len(lower), 'upper_support': len(upper), 'arcs': arcs, 'flow': flow_value / FLOW_SCALE}
    if not feasible:
        return FeasibilityResult(False, None, float(deficit), details)

    mass = {}
    for a in lower:
        for node, value in flow[('lower', a)].items():
            if value > 0:
                mass[(a, node[1])] = value / FLOW_SCALE
    witness = CouplingTable(ground, mass)
    violation = max(
        float(np.max(np.abs(witness.first_marginal() - p.mass))),
        float(np.max(np.abs(witness.second_marginal() - q.mass))),
        witness.non_monotone_mass(),
    )
    if violation > LP_TOL:
        raise InternalConsistencyError(f"Flow witness violates its marginals by {violation:.3e}")
    details['difference_size_law'] = witness.difference_size_law()
    return FeasibilityResult(True, witness, violation, details)


def dominates_by_events(p: DistributionTable, q: DistributionTable, tol: float = FLOW_TOL) -> Tuple[bool, float]:
    """
    Brute-force domination test: p(A) <= q(A) + tol for every increasing
    event A on the whole ground set.

    Returns:
        (verdict, worst margin min_A q(A) - p(A))
    """
    ground = _same_ground(p, q)
    if ground.size > BRUTE_FORCE_LIMIT:
        raise CapacityError(f"Brute-force domination is limited to {BRUTE_FORCE_LIMIT} elements")
    events = local_indicator_matrix(ground.size)
    margins = events @ q.mass - events @ p.mass
    worst = float(margins.min())
    return worst >= -tol, worst


def _phase_one(matrix: scipy.sparse.spmatrix, rhs: np.ndarray) -> Tuple[np.ndarray, float, float]:
    """
    Minimize the total slack of A x + s+ - s- = b over x, s+, s- >= 0.

    Returns:
        (x clipped to be nonnegative, max |A x - b|, optimal slack total)
    """
    rows, columns = matrix.shape
    identity = scipy.sparse.identity(rows, format='csr')
    extended = scipy.sparse.hstack([matrix, identity, -identity], format='csr')
    cost = np.concatenate([np.zeros(columns), np.ones(2 * rows)])
    result = linprog(
        cost, A_eq=extended, b_eq=rhs, bounds=(0, None), method='highs',
        options={'primal_feasibility_tolerance': 1e-10, 'dual_feasibility_tolerance': 1e-10},
    )
    if result.status != 0:
        raise InternalConsistencyError(f"Phase-1 solver failed: {result.message}")
    solution = np.clip(result.x[:columns], 0.0, None)
    violation = float(np.max(np.abs(matrix @ solution - rhs), initial=0.0))
    logger.debug("Phase-1 LP: %d rows, %d columns, slack %.3e, violation %.3e",
                 rows, columns, result.fun, violation)
    return solution, violation, float(result.fun)


def _union_lp(p1: DistributionTable, p2: DistributionTable, p_union: DistributionTable,
              restrict_disjoint: bool) -> Tuple[List[Tuple[int, int]], np.ndarray, float, float]:
    first = p1.support(PRUNE_CUTOFF)
    second = p2.support(PRUNE_CUTOFF)
    unions = p_union.support(PRUNE_CUTOFF)
    union_set = set(unions)
    pairs = [
        (a, b) for a in first for b in second
        if (a | b) in union_set and not (restrict_disjoint and a & b)
    ]
    if not pairs:
        return [], np.zeros(0), 1.0, 1.0

    row_of = {}
    rhs = []
    for family, support, table in (('first', first, p1), ('second', second, p2), ('union', unions, p_union)):
        for mask in support:
            row_of[(family, mask)] = len(rhs)
            rhs.append(table.mass[mask])

    row_index, column_index = [], []
    for column, (a, b) in enumerate(pairs):
        for key in (('first', a), ('second', b), ('union', a | b)):
            row_index.append(row_of[key])
            column_index.append(column)
    matrix = scipy.sparse.csr_matrix(
        (np.ones(len(row_index)), (row_index, column_index)), shape=(len(rhs), len(pairs))
    )
    solution, violation, slack = _phase_one(matrix, np.array(rhs))
    return pairs, solution, violation, slack


def find_disjoint_union_coupling(p1: DistributionTable, p2: DistributionTable, p_union: DistributionTable,
                                 restrict_disjoint: bool = True,
                                 confirm_unrestricted: Optional[bool] = None) -> FeasibilityResult:
    """
    Search for a coupling of p1 and p2 whose union has law p_union.

    Args:
        p1, p2, p_union: Laws on a common ground set
        restrict_disjoint: Only allow disjoint pairs as LP variables
        confirm_unrestricted: Also solve without the restriction and record
            whether the verdicts agree (default: on grounds of at most 5)

    Returns:
        FeasibilityResult with a CouplingTable witness when feasible
    """
    ground = _same_ground(p1, p2, p_union)
    if ground.size > UNION_GROUND_LIMIT:
        raise CapacityError(f"Union coupling LP is limited to {UNION_GROUND_LIMIT} elements")

    pairs, solution, violation, slack = _union_lp(p1, p2, p_union, restrict_disjoint)
    details = {'variables': len(pairs), 'restrict_disjoint': restrict_disjoint, 'phase_one_slack': slack}
    feasible = bool(pairs) and violation <= LP_TOL
    witness = None
    if feasible:
        witness = CouplingTable(ground, {pair: x for pair, x in zip(pairs, solution) if x > PRUNE_CUTOFF})
        violation = max(
            float(np.max(np.abs(witness.first_marginal() - p1.mass))),
            float(np.max(np.abs(witness.second_marginal() - p2.mass))),
            float(np.max(np.abs(witness.union_marginal() - p_union.mass))),
        )
        feasible = violation <= LP_TOL
        details['non_disjoint_mass'] = witness.non_disjoint_mass()

    if confirm_unrestricted is None:
        confirm_unrestricted = restrict_disjoint and ground.size <= UNRESTRICTED_CONFIRM_LIMIT
    if confirm_unrestricted:
        free_pairs, free_solution, free_violation, _ = _union_lp(p1, p2, p_union, False)
        free_feasible = bool(free_pairs) and free_violation <= LP_TOL
        overlap = sum(x for (a, b), x in zip(free_pairs, free_solution) if a & b)
        details['unrestricted_feasible'] = free_feasible
        details['unrestricted_non_disjoint_mass'] = float(overlap)
        details['supports_agree'] = free_feasible == feasible and (not free_feasible or overlap <= LP_TOL)
        if not details['supports_agree']:
            logger.warning("Restricted and unrestricted union LPs disagree")

    return FeasibilityResult(feasible, witness if feasible else None, float(violation), details)


def orthogonal_sum_laws(first: Subspace, second: Subspace) -> Tuple[DistributionTable, DistributionTable,
                                                                    DistributionTable]:
    """Laws of P^{H1}, P^{H2} and P^{H1 ⊕ H2} for orthogonal H1, H2."""
    if first.ground != second.ground:
        raise StructuralError("Subspaces live over different ground sets")
    overlap = np.max(np.abs(first.basis.conj().T @ second.basis), initial=0.0)
    if overlap > max(first.tolerance, 1e-9):
        raise DomainError(f"Subspaces are not orthogonal (overlap {overlap:.3e})")
    total = Subspace(first.ground, np.hstack([first.basis, second.basis]), first.tolerance)
    return (
        enumerate_distribution(projection_kernel(first)),
        enumerate_distribution(projection_kernel(second)),
        enumerate_distribution(projection_kernel(total)),
    )


def complement_coupling(p: DistributionTable) -> CouplingTable:
    """μ(A, E ∖ A) = p(A): the coupling for H ⊕ H^⊥ = ℓ²(E)."""
    full = p.ground.full_mask
    return CouplingTable(p.ground, {(a, full & ~a): p.mass[a] for a in p.support()})


def _image(permutation: Sequence[int], lines: int) -> int:
    image = 0
    for j in indices_of(lines):
        image |= 1 << permutation[j]
    return image


def complete_coupling(ground: GroundSet, lines: np.ndarray) -> FeasibilityResult:
    """
    Search for a random bijection σ from the lines u_1..u_n of an orthogonal
    decomposition of ℓ²(E) to E such that, for every set J of lines, σ(J)
    has the law of the projection measure onto span{u_j : j ∈ J}.

    Args:
        ground: Ground set of size n
        lines: n x n matrix with orthonormal columns u_j

    Raises:
        CapacityError: If n > 6
    """
    n = ground.size
    if n > COMPLETE_GROUND_LIMIT:
        raise CapacityError(f"Complete coupling LP is limited to {COMPLETE_GROUND_LIMIT} elements")
    if n < 1:
        raise DomainError("Complete coupling needs a nonempty ground set")
    frame = Subspace(ground, lines)
    if frame.rank != n:
        raise StructuralError(f"Need {n} orthonormal lines, got {frame.rank}")

    sizes = mask_sizes(n)
    row_of = {}
    rhs = []
    targets = {}
    for chosen in range(1, 1 << n):
        span = Subspace(ground, frame.basis[:, indices_of(chosen)])
        law = enumerate_distribution(projection_kernel(span)).mass
        targets[chosen] = law
        for image in np.flatnonzero(sizes == popcount(chosen)):
            row_of[(chosen, int(image))] = len(rhs)
            rhs.append(law[image])

    permutations = list(itertools.permutations(range(n)))
    row_index, column_index = [], []
    for column, permutation in enumerate(permutations):
        for chosen in range(1, 1 << n):
            row_index.append(row_of[(chosen, _image(permutation, chosen))])
            column_index.append(column)
    matrix = scipy.sparse.csr_matrix(
        (np.ones(len(row_index)), (row_index, column_index)), shape=(len(rhs), len(permutations))
    )
    solution, violation, slack = _phase_one(matrix, np.array(rhs))
    details = {'variables': len(permutations), 'constraints': len(rhs), 'phase_one_slack': slack}
    if violation > LP_TOL:
        return FeasibilityResult(False, None, violation, details)

    witness = PermutationCoupling(
        ground, {p: float(x) for p, x in zip(permutations, solution) if x > PRUNE_CUTOFF}
    )
    violation = max(
        float(np.max(np.abs(witness.image_law(chosen) - targets[chosen]))) for chosen in targets
    )
    return FeasibilityResult(violation <= LP_TOL, witness if violation <= LP_TOL else None, violation, details)


def complete_coupling_zn(n: int) -> FeasibilityResult:
    """Complete coupling for the character decomposition of ℓ²(Z_n)."""
    if not 1 <= n <= COMPLETE_GROUND_LIMIT:
        raise DomainError(f"n must lie in 1..{COMPLETE_GROUND_LIMIT}, got {n}")
    return complete_coupling(zn_ground(n), character_matrix(n))


def gram_schmidt_lines(vectors: np.ndarray) -> np.ndarray:
    """Orthonormalize linearly independent columns in order."""
    vectors = np.asarray(vectors, dtype=complex)
    q, r = np.linalg.qr(vectors)
    if np.min(np.abs(np.diag(r)), initial=np.inf) <= linalg.RANK_TOL:
        raise DomainError("Vectors are linearly dependent")
    return q


@dataclass
class Codim1Report:
    """Law of B' ∖ B under a monotone coupling of P^H and P^{H ⊕ [u]}."""

    passed: bool
    max_deviation: float
    marginal_violation: float
    difference_law: Dict[str, float]

    def to_dict(self) -> Dict:
        return {
            'passed': self.passed,
            'max_deviation': self.max_deviation,
            'marginal_violation': self.marginal_violation,
            'difference_law': self.difference_law,
        }


def codim1_coupling_check(subspace: Subspace, u: Sequence[complex], coupling: CouplingTable) -> Codim1Report:
    """
    Check that B' ∖ B is a single element distributed as |u_e|^2.

    Raises:
        DomainError: If u is not a unit vector orthogonal to H, or the
            coupling is not monotone
    """
    ground = subspace.ground
    if coupling.ground != ground:
        raise StructuralError("Coupling and subspace live over different ground sets")
    vector = np.asarray(u, dtype=complex).ravel()
    if vector.size != ground.size:
        raise StructuralError(f"u has {vector.size} coordinates, expected {ground.size}")
    if abs(np.linalg.norm(vector) - 1) > 1e-9:
        raise DomainError("u must be a unit vector")
    if np.linalg.norm(subspace.basis.conj().T @ vector) > 1e-9:
        raise DomainError("u must be orthogonal to H")
    if coupling.non_monotone_mass() > LP_TOL:
        raise DomainError(f"Coupling is not monotone (mass {coupling.non_monotone_mass():.3e} off the order)")

    larger = Subspace(ground, np.hstack([subspace.basis, vector[:, None]]), subspace.tolerance)
    marginal_violation = max(
        float(np.max(np.abs(coupling.first_marginal() - enumerate_distribution(projection_kernel(subspace)).mass))),
        float(np.max(np.abs(coupling.second_marginal() - enumerate_distribution(projection_kernel(larger)).mass))),
    )

    expected = {1 << e: float(abs(vector[e]) ** 2) for e in range(ground.size)}
    observed = coupling.difference_law()
    deviation = max(abs(observed.get(m, 0.0) - expected.get(m, 0.0)) for m in set(observed) | set(expected))
    return Codim1Report(
        passed=deviation <= LP_TOL and marginal_violation <= LP_TOL,
        max_deviation=float(deviation),
        marginal_violation=marginal_violation,
        difference_law={','.join(ground.labels_of(m)): v for m, v in sorted(observed.items())},
    )
