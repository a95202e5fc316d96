"""
Exterior algebra over a small ground set.

Multivectors are sparse maps from bit-masks to coefficients: the mask A
stands for the basis blade θ_A = e_{a1} ∧ ... ∧ e_{ak} with a1 < ... < ak.
The θ_A are orthonormal. Everything here is an independent oracle for the
determinant formulas in ``measure``.
"""

import itertools
from dataclasses import dataclass
from typing import Dict, Iterable, List, Mapping, Sequence

import numpy as np

from .errors import CapacityError, DomainError, StructuralError
from .ground import GroundSet, indices_of, popcount
from .kernels import Subspace

XI_GROUND_LIMIT = 20
ORACLE_GROUND_LIMIT = 12


def _merge_sign(first: int, second: int) -> int:
    """Sign of the permutation sorting (θ_first, θ_second) into θ_{first ∪ second}."""
    inversions = 0
    for position in indices_of(second):
        inversions += popcount(first >> (position + 1))
    return -1 if inversions % 2 else 1


@dataclass(frozen=True, eq=False)
class Multivector:
    """Sparse element of Ext(E)."""

    ground: GroundSet
    terms: Mapping[int, complex]

    def __post_init__(self):
        cleaned = {}
        for mask, coefficient in dict(self.terms).items():
            self.ground.check_mask(int(mask))
            value = complex(coefficient)
            if value != 0:
                cleaned[int(mask)] = value
        object.__setattr__(self, 'terms', cleaned)

    @classmethod
    def zero(cls, ground: GroundSet) -> 'Multivector':
        return cls(ground, {})

    @classmethod
    def scalar(cls, ground: GroundSet, value: complex = 1.0) -> 'Multivector':
        return cls(ground, {0: value})

    @classmethod
    def blade(cls, ground: GroundSet, mask: int, coefficient: complex = 1.0) -> 'Multivector':
        """The basis multivector θ_A."""
        return cls(ground, {mask: coefficient})

    @classmethod
    def vector(cls, ground: GroundSet, coefficients: Sequence[complex]) -> 'Multivector':
        """Grade-1 multivector Σ c_e e."""
        coefficients = np.asarray(coefficients, dtype=complex).ravel()
        if coefficients.size != ground.size:
            raise StructuralError(f"Expected {ground.size} coefficients, got {coefficients.size}")
        return cls(ground, {1 << i: c for i, c in enumerate(coefficients)})

    def grades(self) -> List[int]:
        return sorted({popcount(mask) for mask in self.terms})

    def coefficient(self, mask: int) -> complex:
        return self.terms.get(mask, 0j)

    def _check_ground(self, other: 'Multivector') -> None:
        if self.ground != other.ground:
            raise StructuralError("Multivectors live over different ground sets")

    def __add__(self, other: 'Multivector') -> 'Multivector':
        self._check_ground(other)
        terms = dict(self.terms)
        for mask, value in other.terms.items():
            terms[mask] = terms.get(mask, 0j) + value
        return Multivector(self.ground, terms)

    def __neg__(self) -> 'Multivector':
        return Multivector(self.ground, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other: 'Multivector') -> 'Multivector':
        return self + (-other)

    def scale(self, factor: complex) -> 'Multivector':
        return Multivector(self.ground, {m: factor * c for m, c in self.terms.items()})

    def __mul__(self, factor: complex) -> 'Multivector':
        return self.scale(factor)

    __rmul__ = __mul__

    def norm(self) -> float:
        return float(np.sqrt(sum(abs(c) ** 2 for c in self.terms.values())))

    def to_dict(self) -> Dict:
        return {
            'labels': list(self.ground.labels),
            'terms': [
                {'subset': self.ground.labels_of(mask), 're': c.real, 'im': c.imag}
                for mask, c in sorted(self.terms.items(), key=lambda item: (popcount(item[0]), item[0]))
            ],
        }


def inner(u: Multivector, v: Multivector) -> complex:
    """<u, v>, linear in u and conjugate-linear in v."""
    u._check_ground(v)
    return complex(sum(c * np.conj(v.terms[m]) for m, c in u.terms.items() if m in v.terms))


def wedge(u: Multivector, v: Multivector) -> Multivector:
    """Exterior product u ∧ v."""
    u._check_ground(v)
    terms: Dict[int, complex] = {}
    for first, a in u.terms.items():
        for second, b in v.terms.items():
            if first & second:
                continue
            mask = first | second
            terms[mask] = terms.get(mask, 0j) + _merge_sign(first, second) * a * b
    return Multivector(u.ground, terms)


def interior(u: Multivector, v: Multivector) -> Multivector:
    """
    Interior product u ∨ v, defined by <u ∨ v, w> = <u, w ∧ v>.

    On blades, θ_A ∨ θ_B is sign(A∖B, B) θ_{A∖B} when B ⊆ A and 0
    otherwise; the product is conjugate-linear in v.
    """
    u._check_ground(v)
    terms: Dict[int, complex] = {}
    for whole, a in u.terms.items():
        for part, b in v.terms.items():
            if part & ~whole:
                continue
            rest = whole & ~part
            terms[rest] = terms.get(rest, 0j) + _merge_sign(rest, part) * a * np.conj(b)
    return Multivector(u.ground, terms)


def wedge_all(ground: GroundSet, factors: Iterable[Multivector]) -> Multivector:
    result = Multivector.scalar(ground)
    for factor in factors:
        result = wedge(result, factor)
    return result


def xi(subspace: Subspace) -> Multivector:
    """
    Unit multivector ξ_H: the wedge of the orthonormal basis columns.

    Raises:
        CapacityError: If the ground set exceeds 20 elements
    """
    ground = subspace.ground
    if ground.size > XI_GROUND_LIMIT:
        raise CapacityError(f"xi is limited to ground sets of at most {XI_GROUND_LIMIT} elements")
    columns = (Multivector.vector(ground, subspace.basis[:, j]) for j in range(subspace.rank))
    return wedge_all(ground, columns)


def _projected_vectors(subspace: Subspace, complement: bool = False) -> List[Multivector]:
    """P_H e (or P_H^⊥ e) for every element e, as 1-vectors."""
    projector = subspace.projector()
    if complement:
        projector = np.eye(subspace.ground.size) - projector
    # P e is the column of the projector indexed by e
    return [Multivector.vector(subspace.ground, projector[:, e]) for e in range(subspace.ground.size)]


def lifted_projection(subspace: Subspace, u: Multivector) -> Multivector:
    """P_{Ext(H)} u, applying P_H to every factor of every blade of u."""
    if u.ground != subspace.ground:
        raise StructuralError("Multivector and subspace live over different ground sets")
    images = _projected_vectors(subspace)
    result = Multivector.zero(subspace.ground)
    for mask, coefficient in u.terms.items():
        lifted = wedge_all(subspace.ground, (images[e] for e in indices_of(mask)))
        result = result + lifted.scale(coefficient)
    return result


def exterior_basis(subspace: Subspace) -> List[Multivector]:
    """Orthonormal basis {∧_{i∈I} v_i : I ⊆ [r]} of Ext(H)."""
    ground = subspace.ground
    columns = [Multivector.vector(ground, subspace.basis[:, j]) for j in range(subspace.rank)]
    basis = []
    for k in range(subspace.rank + 1):
        for chosen in itertools.combinations(range(subspace.rank), k):
            basis.append(wedge_all(ground, (columns[j] for j in chosen)))
    return basis


def exterior_projection(subspace: Subspace, u: Multivector) -> Multivector:
    """Orthogonal projection onto Ext(H) computed from a full orthonormal basis."""
    if u.ground != subspace.ground:
        raise StructuralError("Multivector and subspace live over different ground sets")
    result = Multivector.zero(subspace.ground)
    for element in exterior_basis(subspace):
        result = result + element.scale(inner(u, element))
    return result


def oracle_cylinder(subspace: Subspace, include: int, exclude: int = 0) -> float:
    """
    P^H[A ⊆ S, B ∩ S = ∅] evaluated literally in the exterior algebra as
    <∧_{e∈A} P_H e ∧ ∧_{e∈B} P_H^⊥ e, θ_A ∧ θ_B>.

    Overlapping A and B give 0.
    """
    ground = subspace.ground
    if ground.size > ORACLE_GROUND_LIMIT:
        raise CapacityError(f"oracle_cylinder is limited to {ORACLE_GROUND_LIMIT} elements")
    ground.check_mask(include)
    ground.check_mask(exclude)
    if include & exclude:
        return 0.0

    inside = _projected_vectors(subspace)
    outside = _projected_vectors(subspace, complement=True)
    factors = [inside[e] for e in indices_of(include)] + [outside[e] for e in indices_of(exclude)]
    lifted = wedge_all(ground, factors)

    target = wedge(Multivector.blade(ground, include), Multivector.blade(ground, exclude))
    value = inner(lifted, target)
    if abs(value.imag) > 1e-9:
        raise DomainError(f"Exterior cylinder value has imaginary part {value.imag:.3e}")
    return float(value.real)
