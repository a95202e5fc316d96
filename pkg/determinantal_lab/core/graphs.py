"""
Graphic front end: star spaces, transfer currents, tree counts and
Kirchhoff current vectors.
"""

import itertools
import logging
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple, Union

import networkx as nx
import numpy as np
import scipy.linalg

from .errors import (CapacityError, DomainError, ImpossibleEventError,
                     InternalConsistencyError, SingularBaseError, StructuralError)
from .ground import GroundSet, indices_of
from .kernels import Kernel, Subspace, projection_kernel
from .measure import cylinder_prob, enumerate_distribution
from ..utils import linalg

logger = logging.getLogger(__name__)

KIRCHHOFF_GROUND_LIMIT = 12
CONDITIONED_GROUND_LIMIT = 10
RESIDUAL_TOL = 1e-8
EXPECTATION_TOL = 1e-8
CONDITIONED_TOL = 1e-7
BASE_MASS_CUTOFF = 1e-12


@dataclass(frozen=True)
class Edge:
    """Oriented edge with a positive weight."""

    id: str
    tail: str
    head: str
    weight: float = 1.0


@dataclass(frozen=True)
class Graph:
    """Finite multigraph; parallel edges and self-loops are allowed."""

    vertices: Tuple[str, ...]
    edges: Tuple[Edge, ...]

    def __post_init__(self):
        vertices = tuple(str(v) for v in self.vertices)
        object.__setattr__(self, 'vertices', vertices)
        object.__setattr__(self, 'edges', tuple(self.edges))
        if len(set(vertices)) != len(vertices):
            raise StructuralError("Vertex labels must be distinct")
        known = set(vertices)
        for edge in self.edges:
            if edge.tail not in known or edge.head not in known:
                raise StructuralError(f"Edge {edge.id} joins unknown vertices {edge.tail}, {edge.head}")
            if not edge.weight > 0:
                raise DomainError(f"Edge {edge.id} has nonpositive weight {edge.weight}")
        # raises on duplicate edge ids
        GroundSet(tuple(edge.id for edge in self.edges))

    @property
    def ground(self) -> GroundSet:
        return GroundSet(tuple(edge.id for edge in self.edges))

    def to_networkx(self) -> nx.MultiGraph:
        graph = nx.MultiGraph()
        graph.add_nodes_from(self.vertices)
        for edge in self.edges:
            graph.add_edge(edge.tail, edge.head, key=edge.id, weight=edge.weight)
        return graph

    def components(self) -> List[List[str]]:
        order = {v: i for i, v in enumerate(self.vertices)}
        parts = [sorted(part, key=order.get) for part in nx.connected_components(self.to_networkx())]
        return sorted(parts, key=lambda part: order[part[0]])

    def is_connected(self) -> bool:
        return len(self.vertices) > 0 and nx.is_connected(self.to_networkx())

    def require_connected(self) -> None:
        if not self.vertices:
            raise DomainError("Graph has no vertices")
        parts = self.components()
        if len(parts) > 1:
            report = '; '.join('{' + ', '.join(part) + '}' for part in parts)
            raise DomainError(f"Graph is disconnected: {len(parts)} components {report}")

    def flipped(self, edge_id: str) -> 'Graph':
        """Same graph with one edge reversed."""
        edges = tuple(
            Edge(e.id, e.head, e.tail, e.weight) if e.id == edge_id else e for e in self.edges
        )
        return Graph(self.vertices, edges)

    def to_dict(self) -> Dict:
        return {
            'vertices': list(self.vertices),
            'edges': [{'id': e.id, 'tail': e.tail, 'head': e.head, 'w': e.weight} for e in self.edges],
        }


def complete_graph(n: int) -> Graph:
    vertices = tuple(f"v{i + 1}" for i in range(n))
    edges = tuple(
        Edge(f"{vertices[i]}{vertices[j]}", vertices[i], vertices[j])
        for i, j in itertools.combinations(range(n), 2)
    )
    return Graph(vertices, edges)


def path_graph(n: int) -> Graph:
    """Path on n vertices."""
    vertices = tuple(f"v{i + 1}" for i in range(n))
    edges = tuple(Edge(f"p{i + 1}", vertices[i], vertices[i + 1]) for i in range(n - 1))
    return Graph(vertices, edges)


def cycle_graph(n: int) -> Graph:
    vertices = tuple(f"v{i + 1}" for i in range(n))
    edges = tuple(Edge(f"c{i + 1}", vertices[i], vertices[(i + 1) % n]) for i in range(n))
    return Graph(vertices, edges)


def random_connected_graph(n: int, rng: np.random.Generator, edge_probability: float = 0.5) -> Graph:
    """G(n, p) graph, with components joined by extra edges until connected."""
    if n < 1:
        raise DomainError(f"A graph needs at least one vertex, got {n}")
    sample = nx.gnp_random_graph(n, edge_probability, seed=int(rng.integers(2 ** 31)))
    parts = [min(part) for part in nx.connected_components(sample)]
    parts.sort()
    for left, right in zip(parts, parts[1:]):
        sample.add_edge(left, right)
    vertices = tuple(f"v{i + 1}" for i in range(n))
    edges = tuple(
        Edge(f"x{k + 1}", vertices[u], vertices[v])
        for k, (u, v) in enumerate(sorted(tuple(sorted(edge)) for edge in sample.edges()))
    )
    return Graph(vertices, edges)


def incidence_matrix(graph: Graph) -> np.ndarray:
    """a(x, e): +1 at the tail, -1 at the head, 0 for self-loops."""
    index = {v: i for i, v in enumerate(graph.vertices)}
    matrix = np.zeros((len(graph.vertices), len(graph.edges)))
    for column, edge in enumerate(graph.edges):
        if edge.tail != edge.head:
            matrix[index[edge.tail], column] = 1.0
            matrix[index[edge.head], column] = -1.0
    return matrix


def weighted_laplacian(graph: Graph) -> np.ndarray:
    weights = np.array([edge.weight for edge in graph.edges])
    incidence = incidence_matrix(graph)
    return (incidence * weights) @ incidence.T


def star_space(graph: Graph) -> Subspace:
    """
    Span of the weighted stars Σ_e sqrt(w(e)) a(x, e) e, orthonormalized by
    pivoted QR.

    Raises:
        DomainError: If the graph is disconnected
    """
    graph.require_connected()
    weights = np.sqrt([edge.weight for edge in graph.edges])
    stars = incidence_matrix(graph) * weights
    basis = linalg.qr_basis(stars.T)
    if basis.shape[1] != len(graph.vertices) - 1:
        raise InternalConsistencyError(
            f"Star space has rank {basis.shape[1]}, expected {len(graph.vertices) - 1}"
        )
    return Subspace(graph.ground, basis)


def transfer_current(graph: Graph) -> Kernel:
    """Transfer current matrix Y: the projection kernel of the star space."""
    kernel = projection_kernel(star_space(graph))
    return Kernel(kernel.ground, np.real(kernel.entries), kernel.tolerance)


def tree_count(graph: Graph) -> float:
    """Weighted number of spanning trees (reduced Laplacian determinant)."""
    graph.require_connected()
    laplacian = weighted_laplacian(graph)
    if laplacian.shape[0] == 1:
        return 1.0
    return float(scipy.linalg.det(laplacian[1:, 1:]))


def spanning_trees(graph: Graph) -> List[int]:
    """Masks of all spanning trees, by brute force over |V|-1 edge subsets."""
    graph.require_connected()
    ground = graph.ground
    ground.require_enumerable()
    needed = len(graph.vertices) - 1
    trees = []
    for chosen in itertools.combinations(range(len(graph.edges)), needed):
        forest = nx.MultiGraph()
        forest.add_nodes_from(graph.vertices)
        forest.add_edges_from((graph.edges[i].tail, graph.edges[i].head) for i in chosen)
        if nx.is_tree(forest):
            trees.append(ground.mask_of(chosen))
    return sorted(trees)


def unit_vector(ground: GroundSet, label: str) -> np.ndarray:
    vector = np.zeros(ground.size, dtype=complex)
    vector[ground.index(label)] = 1.0
    return vector


def _as_vector(subspace: Subspace, v: Union[str, Sequence[complex], np.ndarray]) -> np.ndarray:
    if isinstance(v, str):
        return unit_vector(subspace.ground, v)
    vector = np.asarray(v, dtype=complex).ravel()
    if vector.size != subspace.ground.size:
        raise StructuralError(f"Vector has {vector.size} coordinates, expected {subspace.ground.size}")
    return vector


def zeta_vector(subspace: Subspace, v, base: int) -> np.ndarray:
    """
    ζ^v_B = Σ_{e∈B} a_v(e, B) e, where P_H v = Σ_{e∈B} a_v(e, B) P_H e.

    Raises:
        SingularBaseError: If {P_H e : e ∈ B} is dependent or does not span P_H v
    """
    subspace.ground.check_mask(base)
    vector = _as_vector(subspace, v)
    members = indices_of(base)
    projector = subspace.projector()
    target = projector @ vector
    zeta = np.zeros(subspace.ground.size, dtype=complex)
    if not members:
        if np.max(np.abs(target), initial=0.0) > RESIDUAL_TOL:
            raise SingularBaseError("Empty set cannot express a nonzero projection")
        return zeta

    columns = projector[:, members]
    singular = scipy.linalg.svdvals(columns)
    if int(np.sum(singular > linalg.RANK_TOL)) != len(members):
        raise SingularBaseError(
            f"Projected vectors of {{{', '.join(subspace.ground.labels_of(base))}}} are linearly dependent"
        )
    coefficients, _, _, _ = scipy.linalg.lstsq(columns, target)
    residual = float(np.max(np.abs(columns @ coefficients - target), initial=0.0))
    if residual > RESIDUAL_TOL:
        raise SingularBaseError(f"Least-squares residual {residual:.3e}: the set is not a base")
    zeta[members] = coefficients
    return zeta


def kirchhoff_vector(subspace: Subspace, v, base: int) -> Dict[str, complex]:
    """Coefficient map e -> a_v(e, B) over the elements of B."""
    zeta = zeta_vector(subspace, v, base)
    return {subspace.ground.labels[i]: complex(zeta[i]) for i in indices_of(base)}


def _weighted_zeta(subspace: Subspace, vector: np.ndarray, base: int, mass: float) -> np.ndarray:
    """
    P^H[B] ζ^v_B; bases of tiny mass use Cramer's rule,
    conj(det M) det(M_j), which needs no division.
    """
    if mass > BASE_MASS_CUTOFF:
        return mass * zeta_vector(subspace, vector, base)
    members = indices_of(base)
    block = subspace.basis[members, :].conj().T
    rhs = subspace.basis.conj().T @ vector
    determinant = np.linalg.det(block)
    weighted = np.zeros(subspace.ground.size, dtype=complex)
    for j, element in enumerate(members):
        replaced = block.copy()
        replaced[:, j] = rhs
        weighted[element] = np.conj(determinant) * np.linalg.det(replaced)
    return weighted


def expected_kirchhoff(subspace: Subspace, v) -> np.ndarray:
    """
    Σ_B P^H[B] ζ^v_B, checked against P_H v.

    Raises:
        CapacityError: If the ground set exceeds 12 elements
        InternalConsistencyError: If the identity fails beyond 1e-8
    """
    if subspace.ground.size > KIRCHHOFF_GROUND_LIMIT:
        raise CapacityError(f"expected_kirchhoff is limited to {KIRCHHOFF_GROUND_LIMIT} elements")
    vector = _as_vector(subspace, v)
    table = enumerate_distribution(projection_kernel(subspace))
    rank = subspace.rank

    expectation = np.zeros(subspace.ground.size, dtype=complex)
    for chosen in itertools.combinations(range(subspace.ground.size), rank):
        base = subspace.ground.mask_of(chosen)
        expectation += _weighted_zeta(subspace, vector, base, table.mass[base])

    projected = subspace.projector() @ vector
    error = float(np.max(np.abs(expectation - projected), initial=0.0))
    logger.debug("Expected Kirchhoff vector deviates from P_H v by %.3e", error)
    if error > EXPECTATION_TOL:
        raise InternalConsistencyError(f"E[zeta] differs from P_H v by {error:.3e}")
    return expectation


def contracted_deleted(subspace: Subspace, window: int, chosen: int) -> Subspace:
    """H^F_S = (H + [F ∖ S]) ∩ [F]^⊥."""
    n = subspace.ground.size
    deleted = linalg.coordinate_basis(n, indices_of(window & ~chosen))
    outside = linalg.coordinate_basis(n, indices_of(subspace.ground.full_mask & ~window))
    basis = linalg.intersection(linalg.span_sum(subspace.basis, deleted), outside, n)
    return Subspace(subspace.ground, basis, subspace.tolerance)


def conditioned_kirchhoff(subspace: Subspace, window: int, chosen: int, element: Union[str, int]) -> np.ndarray:
    """
    P_{H^F_S} e, cross-checked against P_{[F]}^⊥ E[ζ^e_B | B ∩ F = S].

    Args:
        subspace: Subspace H
        window: Mask of F
        chosen: Mask of S ⊆ F
        element: Label or position of e ∉ F

    Raises:
        ImpossibleEventError: If P[B ∩ F = S] <= tolerance
        DomainError: If e lies in F or outside the ground set
    """
    ground = subspace.ground
    if ground.size > CONDITIONED_GROUND_LIMIT:
        raise CapacityError(f"conditioned_kirchhoff is limited to {CONDITIONED_GROUND_LIMIT} elements")
    ground.check_mask(window)
    if chosen & ~window:
        raise DomainError("S must be a subset of F")
    position = ground.index(element) if isinstance(element, str) else int(element)
    if not 0 <= position < ground.size:
        raise DomainError(f"Element position {position} is outside a ground set of size {ground.size}")
    if window >> position & 1:
        raise DomainError("The element must lie outside F")

    kernel = projection_kernel(subspace)
    probability = cylinder_prob(kernel, chosen, window & ~chosen)
    if probability <= subspace.tolerance:
        raise ImpossibleEventError(f"P[B ∩ F = S] = {probability:.3e} is not positive")

    vector = np.zeros(ground.size, dtype=complex)
    vector[position] = 1.0
    left = contracted_deleted(subspace, window, chosen).projector() @ vector

    table = enumerate_distribution(kernel)
    conditional = np.zeros(ground.size, dtype=complex)
    for base in itertools.combinations(range(ground.size), subspace.rank):
        mask = ground.mask_of(base)
        if mask & window != chosen:
            continue
        conditional += _weighted_zeta(subspace, vector, mask, table.mass[mask])
    right = conditional / probability
    right[indices_of(window)] = 0

    error = float(np.max(np.abs(left - right), initial=0.0))
    logger.debug("Conditioned Kirchhoff identity error %.3e", error)
    if error > CONDITIONED_TOL:
        raise InternalConsistencyError(f"Conditioned Kirchhoff identity fails by {error:.3e}")
    return left
