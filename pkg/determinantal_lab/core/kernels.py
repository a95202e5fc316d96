"""
Determinantal kernels and closed subspaces.

A ``Kernel`` stores the matrix whose row ``e``, column ``f`` entry is
<Qe, f>, so that P[A ⊆ S] = det(Q restricted to A). A ``Subspace`` stores an
orthonormal basis; its projection kernel is ``basis @ basis*``.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Mapping, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from .errors import (DomainError, ImpossibleEventError, InternalConsistencyError,
                     StructuralError, ValidationError)
from .ground import GroundSet, indices_of
from ..utils import linalg

logger = logging.getLogger(__name__)

DEFAULT_TOLERANCE = 1e-9


def _frozen_matrix(values, shape: Tuple[int, int], what: str) -> np.ndarray:
    matrix = np.array(values, dtype=complex)
    if matrix.ndim == 1 and shape[1] == 1 and matrix.shape[0] == shape[0]:
        matrix = matrix.reshape(shape)
    if matrix.size == 0 and shape[0] * shape[1] == 0:
        matrix = matrix.reshape(shape)
    if matrix.shape != shape:
        raise StructuralError(f"{what} has shape {matrix.shape}, expected {shape}")
    if not np.all(np.isfinite(matrix)):
        raise ValidationError(f"{what} contains non-finite entries")
    matrix.setflags(write=False)
    return matrix


@dataclass(frozen=True, eq=False)
class Kernel:
    """Square complex matrix over a labeled ground set."""

    ground: GroundSet
    entries: np.ndarray
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        n = self.ground.size
        raw = np.asarray(self.entries)
        if raw.ndim != 2 or raw.shape[0] != raw.shape[1]:
            raise StructuralError(f"Kernel entries must be a square matrix, got shape {raw.shape}")
        object.__setattr__(self, 'entries', _frozen_matrix(raw, (n, n), "Kernel entries"))
        if not self.tolerance >= 0:
            raise DomainError(f"Tolerance must be nonnegative, got {self.tolerance}")

    @property
    def size(self) -> int:
        return self.ground.size

    def diagonal(self) -> np.ndarray:
        return np.real(np.diag(self.entries)).copy()

    def restrict(self, positions: Sequence[int]) -> 'Kernel':
        """Principal submatrix on the given positions."""
        positions = list(positions)
        block = self.entries[np.ix_(positions, positions)]
        return Kernel(self.ground.restrict(positions), block, self.tolerance)

    def with_tolerance(self, tolerance: float) -> 'Kernel':
        return Kernel(self.ground, self.entries, tolerance)


@dataclass(frozen=True, eq=False)
class Subspace:
    """Closed subspace H of the ground space, given by orthonormal columns."""

    ground: GroundSet
    basis: np.ndarray
    tolerance: float = DEFAULT_TOLERANCE

    def __post_init__(self):
        n = self.ground.size
        raw = np.array(self.basis, dtype=complex)
        if raw.ndim == 1:
            raw = raw.reshape(n, -1) if n else raw.reshape(0, 0)
        if raw.ndim != 2 or raw.shape[0] != n:
            raise StructuralError(f"Subspace basis must have {n} rows, got shape {raw.shape}")
        basis = _frozen_matrix(raw, raw.shape, "Subspace basis")
        object.__setattr__(self, 'basis', basis)
        defect = self.orthonormality_defect()
        if defect > max(self.tolerance, DEFAULT_TOLERANCE):
            raise ValidationError(f"Basis columns are not orthonormal (defect {defect:.3e})")

    @classmethod
    def spanned_by(cls, ground: GroundSet, vectors, tolerance: float = DEFAULT_TOLERANCE) -> 'Subspace':
        """Subspace spanned by arbitrary column vectors."""
        return cls(ground, linalg.orthonormal_basis(np.asarray(vectors, dtype=complex).reshape(ground.size, -1)),
                   tolerance)

    @classmethod
    def coordinate(cls, ground: GroundSet, mask: int) -> 'Subspace':
        """The coordinate subspace [A]."""
        return cls(ground, linalg.coordinate_basis(ground.size, indices_of(mask)))

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def orthonormality_defect(self) -> float:
        if self.rank == 0:
            return 0.0
        gram = self.basis.conj().T @ self.basis
        return float(np.max(np.abs(gram - np.eye(self.rank))))

    def projector(self) -> np.ndarray:
        return linalg.projector(self.basis)

    def complement(self) -> 'Subspace':
        return Subspace(self.ground, linalg.orthogonal_complement(self.basis, self.ground.size), self.tolerance)


@dataclass(frozen=True)
class ConditionSpec:
    """Elements forced inside (include) and outside (exclude) the random set."""

    include: int = 0
    exclude: int = 0

    def __post_init__(self):
        if self.include < 0 or self.exclude < 0:
            raise StructuralError("Condition masks must be nonnegative")
        if self.include & self.exclude:
            raise DomainError("Include and exclude sets overlap")

    @classmethod
    def from_labels(cls, ground: GroundSet, include=(), exclude=()) -> 'ConditionSpec':
        return cls(ground.mask_of(include), ground.mask_of(exclude))

    @property
    def touched(self) -> int:
        return self.include | self.exclude


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of ``validate``."""

    size: int
    hermitian_defect: float
    min_eigenvalue: float
    max_eigenvalue: float
    eigenvalues: Tuple[float, ...]
    tolerance: float
    passed: bool
    problems: Tuple[str, ...] = field(default_factory=tuple)

    def to_dict(self) -> Dict:
        return {
            'size': self.size,
            'hermitian_defect': self.hermitian_defect,
            'min_eigenvalue': self.min_eigenvalue,
            'max_eigenvalue': self.max_eigenvalue,
            'eigenvalues': list(self.eigenvalues),
            'tolerance': self.tolerance,
            'passed': self.passed,
            'problems': list(self.problems),
        }


def validate(kernel: Kernel) -> ValidationReport:
    """
    Check that a kernel is a Hermitian positive contraction.

    Args:
        kernel: Kernel to check

    Returns:
        ValidationReport with the Hermitian defect and the eigenvalue range
    """
    q = kernel.entries
    tol = kernel.tolerance
    if kernel.size == 0:
        return ValidationReport(0, 0.0, 0.0, 0.0, (), tol, True)

    defect = float(np.max(np.abs(q - q.conj().T)))
    eigenvalues = scipy.linalg.eigvalsh(linalg.hermitize(q))
    low, high = float(eigenvalues[0]), float(eigenvalues[-1])

    problems = []
    if defect > tol:
        problems.append(f"Hermitian defect {defect:.3e} exceeds tolerance {tol:.1e}")
    if low < -tol:
        problems.append(f"eigenvalue {low:.6g} < 0")
    if high > 1 + tol:
        problems.append(f"eigenvalue {high:.6g} > 1")

    return ValidationReport(
        size=kernel.size,
        hermitian_defect=defect,
        min_eigenvalue=low,
        max_eigenvalue=high,
        eigenvalues=tuple(float(v) for v in eigenvalues),
        tolerance=tol,
        passed=not problems,
        problems=tuple(problems),
    )


def ensure_valid(kernel: Kernel) -> None:
    report = validate(kernel)
    if not report.passed:
        raise ValidationError("Invalid kernel: " + "; ".join(report.problems))


def projection_kernel(subspace: Subspace) -> Kernel:
    """Kernel of the orthogonal projection onto ``subspace``."""
    return Kernel(subspace.ground, subspace.projector(), subspace.tolerance)


def dual(kernel: Kernel) -> Kernel:
    """I - Q, the kernel of the complement of the random set."""
    ensure_valid(kernel)
    return Kernel(kernel.ground, np.eye(kernel.size) - kernel.entries, kernel.tolerance)


def _schur_include(q: np.ndarray, pivots: Sequence[int]) -> Tuple[np.ndarray, list]:
    """Condition on ``pivots`` being included; returns the kernel on the rest."""
    pivot_set = set(pivots)
    rest = [i for i in range(q.shape[0]) if i not in pivot_set]
    if not pivots:
        return q.copy(), rest
    q_aa = q[np.ix_(pivots, pivots)]
    q_ar = q[np.ix_(pivots, rest)]
    q_ra = q[np.ix_(rest, pivots)]
    try:
        update = q_ra @ scipy.linalg.solve(q_aa, q_ar, assume_a='her')
    except (scipy.linalg.LinAlgError, ValueError) as exc:
        raise InternalConsistencyError(f"Singular pivot block while conditioning: {exc}") from exc
    return linalg.hermitize(q[np.ix_(rest, rest)] - update), rest


def condition(kernel: Kernel, given: ConditionSpec) -> Kernel:
    """
    Kernel of S ∖ A given A ⊆ S and B ∩ S = ∅, on the ground E ∖ (A ∪ B).

    Inclusions go through a Schur complement; exclusions are handled by
    dualizing, including, and dualizing back.

    Raises:
        ImpossibleEventError: If the conditioning event has probability <= tolerance
    """
    from .measure import cylinder_prob

    ensure_valid(kernel)
    kernel.ground.check_mask(given.include)
    kernel.ground.check_mask(given.exclude)

    probability = cylinder_prob(kernel, given.include, given.exclude)
    if probability <= kernel.tolerance:
        raise ImpossibleEventError(
            f"Conditioning event has probability {probability:.3e} (tolerance {kernel.tolerance:.1e})"
        )

    included = indices_of(given.include)
    after_include, remaining = _schur_include(np.array(kernel.entries), included)

    excluded = [remaining.index(i) for i in indices_of(given.exclude)]
    identity = np.eye(len(remaining))
    dual_conditioned, kept_local = _schur_include(identity - after_include, excluded)
    result = np.eye(len(kept_local)) - dual_conditioned

    kept = [remaining[i] for i in kept_local]
    logger.debug("Conditioned on %d inclusions and %d exclusions; %d elements remain",
                 len(included), len(excluded), len(kept))
    return Kernel(kernel.ground.restrict(kept), linalg.hermitize(result), kernel.tolerance)


def subspace_condition(subspace: Subspace, given: ConditionSpec) -> Subspace:
    """
    The subspace ((H ∩ A^⊥) + [A ∪ B]) ∩ B^⊥ on the full ground set.

    Raises:
        ImpossibleEventError: If the conditioning event has probability <= tolerance
    """
    from .measure import cylinder_prob

    ground = subspace.ground
    ground.check_mask(given.include)
    ground.check_mask(given.exclude)
    probability = cylinder_prob(projection_kernel(subspace), given.include, given.exclude)
    if probability <= subspace.tolerance:
        raise ImpossibleEventError(
            f"Conditioning event has probability {probability:.3e} (tolerance {subspace.tolerance:.1e})"
        )

    n = ground.size
    everything = ground.full_mask
    outside_a = linalg.coordinate_basis(n, indices_of(everything & ~given.include))
    outside_b = linalg.coordinate_basis(n, indices_of(everything & ~given.exclude))
    touched = linalg.coordinate_basis(n, indices_of(given.touched))

    basis = linalg.intersection(subspace.basis, outside_a, n)
    basis = linalg.span_sum(basis, touched)
    basis = linalg.intersection(basis, outside_b, n)
    return Subspace(ground, basis, subspace.tolerance)


def _hatted_labels(ground: GroundSet) -> Tuple[str, ...]:
    taken = set(ground.labels)
    hatted = []
    for label in ground.labels:
        candidate = label + '^'
        while candidate in taken:
            candidate += '^'
        taken.add(candidate)
        hatted.append(candidate)
    return tuple(hatted)


def dilate(kernel: Kernel) -> Subspace:
    """
    Projection on E ∪ Ê whose compression to E is ``kernel``.

    The basis is the stacked pair (Q^{1/2}, (I - Q)^{1/2}); its projector is
    [[Q, T T̂], [T̂ T, I - Q]].
    """
    ensure_valid(kernel)
    q = linalg.hermitize(np.array(kernel.entries))
    root = linalg.psd_sqrt(q)
    co_root = linalg.psd_sqrt(np.eye(kernel.size) - q)
    doubled = GroundSet(kernel.ground.labels + _hatted_labels(kernel.ground))
    tolerance = max(kernel.tolerance, DEFAULT_TOLERANCE)
    return Subspace(doubled, np.vstack([root, co_root]), tolerance)


def reweight(subspace: Subspace, weights: Union[Sequence[float], Mapping[str, float]]) -> Subspace:
    """
    Image of H under D_w, where D_w e = sqrt(w(e)) e.

    Args:
        subspace: Subspace H
        weights: One positive weight per element, or a label -> weight map
            (missing labels default to 1)

    Raises:
        DomainError: If a weight is not positive
    """
    ground = subspace.ground
    if isinstance(weights, Mapping):
        unknown = set(weights) - set(ground.labels)
        if unknown:
            raise StructuralError(f"Weights given for unknown labels: {', '.join(sorted(unknown))}")
        values = np.array([float(weights.get(label, 1.0)) for label in ground.labels])
    else:
        values = np.asarray(weights, dtype=float)
    if values.shape != (ground.size,):
        raise StructuralError(f"Expected {ground.size} weights, got {values.size}")
    if not np.all(values > 0):
        raise DomainError("All weights must be positive")
    scaled = np.sqrt(values)[:, None] * subspace.basis
    basis = linalg.orthonormal_basis(scaled)
    if basis.shape[1] != subspace.rank:
        raise InternalConsistencyError("Reweighting changed the rank of the subspace")
    return Subspace(ground, basis, subspace.tolerance)
