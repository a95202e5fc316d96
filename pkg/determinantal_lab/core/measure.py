"""
Exact probability computations for determinantal measures.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
import scipy.linalg
import scipy.special

from .errors import (CapacityError, DomainError, InternalConsistencyError,
                     StructuralError, ValidationError)
from .ground import GroundSet, indices_of, membership_bits, popcount
from .kernels import Kernel, Subspace
from ..utils import linalg

logger = logging.getLogger(__name__)

MAX_CYLINDER_SIZE = 25
NEGATIVE_DETERMINANT_LIMIT = -1e-8
IMAGINARY_LIMIT = 1e-9
MASS_SUM_TOL = 1e-8
MEAN_CONSISTENCY_TOL = 1e-8
ENUMERATION_CHUNK = 4096


@dataclass(frozen=True, eq=False)
class DistributionTable:
    """Probability mass over all 2^|E| subsets, indexed by bit-mask."""

    ground: GroundSet
    mass: np.ndarray
    sample_count: Optional[int] = None

    def __post_init__(self):
        self.ground.require_enumerable()
        mass = np.array(self.mass, dtype=float)
        if mass.shape != (1 << self.ground.size,):
            raise StructuralError(
                f"Mass vector has shape {mass.shape}, expected ({1 << self.ground.size},)"
            )
        if np.any(mass < -1e-12):
            raise ValidationError(f"Negative mass {mass.min():.3e} in distribution table")
        total = mass.sum()
        if abs(total - 1) > MASS_SUM_TOL:
            raise ValidationError(f"Masses sum to {total:.12g}, not 1")
        mass = np.clip(mass, 0.0, None)
        mass.setflags(write=False)
        object.__setattr__(self, 'mass', mass)

    def probability(self, mask: int) -> float:
        self.ground.check_mask(mask)
        return float(self.mass[mask])

    def event_probability(self, indicator: np.ndarray) -> float:
        """Total mass of the masks flagged in a boolean array of length 2^|E|."""
        return float(self.mass[np.asarray(indicator, dtype=bool)].sum())

    def support(self, cutoff: float = 0.0) -> List[int]:
        return [int(m) for m in np.flatnonzero(self.mass > cutoff)]

    def marginals(self) -> np.ndarray:
        """Inclusion probability of every element."""
        return self.mass @ membership_bits(self.ground.size)

    def complement_pushforward(self) -> 'DistributionTable':
        """Law of E ∖ S."""
        full = self.ground.full_mask
        masks = np.arange(self.mass.size)
        return DistributionTable(self.ground, self.mass[full ^ masks], self.sample_count)

    def pushforward(self, positions: Sequence[int]) -> 'DistributionTable':
        """Law of S ∩ E' for E' given by ``positions``, on the restricted ground."""
        positions = list(positions)
        masks = np.arange(self.mass.size, dtype=np.int64)
        image = np.zeros(self.mass.size, dtype=np.int64)
        for new_position, old_position in enumerate(positions):
            image |= ((masks >> old_position) & 1) << new_position
        mass = np.bincount(image, weights=self.mass, minlength=1 << len(positions))
        return DistributionTable(self.ground.restrict(positions), mass, self.sample_count)

    def conditional(self, include: int, exclude: int) -> 'DistributionTable':
        """
        Law of S ∖ A given A ⊆ S and S ∩ B = ∅, on E ∖ (A ∪ B).

        Raises:
            DomainError: If the conditioning event has zero mass
        """
        if include & exclude:
            raise DomainError("Include and exclude sets overlap")
        masks = np.arange(self.mass.size)
        event = ((masks & include) == include) & ((masks & exclude) == 0)
        total = self.mass[event].sum()
        if total <= 0:
            raise DomainError("Conditioning event has zero mass")
        keep = indices_of(self.ground.full_mask & ~(include | exclude))
        conditioned = np.where(event, self.mass, 0.0) / total
        return DistributionTable(self.ground, conditioned).pushforward(keep)

    def to_frame(self, cutoff: float = 0.0) -> pd.DataFrame:
        rows = [
            {
                'mask': mask,
                'subset': ','.join(self.ground.labels_of(mask)),
                'probability': float(self.mass[mask]),
            }
            for mask in range(self.mass.size)
            if self.mass[mask] > cutoff
        ]
        return pd.DataFrame(rows, columns=['mask', 'subset', 'probability'])

    def to_csv(self, cutoff: float = -1.0) -> str:
        return self.to_frame(cutoff).to_csv(index=False, float_format='%.17g')

    def to_dict(self, cutoff: float = 0.0) -> Dict:
        return {
            'labels': list(self.ground.labels),
            'sample_count': self.sample_count,
            'masses': [
                {'mask': int(mask), 'subset': self.ground.labels_of(int(mask)), 'probability': float(self.mass[mask])}
                for mask in range(self.mass.size)
                if self.mass[mask] > cutoff
            ],
        }


@dataclass(frozen=True, eq=False)
class CoordinatizationMatrix:
    """r x |E| matrix of full row rank; columns represent the elements."""

    ground: GroundSet
    rows: np.ndarray

    def __post_init__(self):
        rows = np.array(self.rows, dtype=complex)
        if rows.ndim != 2 or rows.shape[1] != self.ground.size:
            raise StructuralError(f"Rows must have {self.ground.size} columns, got shape {rows.shape}")
        singular = scipy.linalg.svdvals(rows) if rows.size else np.zeros(0)
        if int(np.sum(singular > linalg.RANK_TOL)) != rows.shape[0]:
            raise ValidationError("Coordinatization matrix does not have full row rank")
        rows.setflags(write=False)
        object.__setattr__(self, 'rows', rows)

    @property
    def rank(self) -> int:
        return self.rows.shape[0]

    def row_space(self) -> Subspace:
        """Orthonormalized row space as a subspace of the ground space."""
        return Subspace(self.ground, linalg.orthonormal_basis(self.rows.T))


def _cylinder_matrix(q: np.ndarray, include: Sequence[int], exclude: Sequence[int]) -> np.ndarray:
    """Principal block on A ∪ B with excluded rows taken from I - Q."""
    positions = sorted(list(include) + list(exclude))
    block = q[np.ix_(positions, positions)].copy()
    excluded = set(exclude)
    for row, position in enumerate(positions):
        if position in excluded:
            block[row, :] = -block[row, :]
            block[row, row] += 1.0
    return block


def _checked_probability(value: complex, what: str) -> float:
    if abs(value.imag) > IMAGINARY_LIMIT:
        raise InternalConsistencyError(f"{what} has imaginary part {value.imag:.3e}")
    real = float(value.real)
    if real < NEGATIVE_DETERMINANT_LIMIT or real > 1 - NEGATIVE_DETERMINANT_LIMIT:
        raise ValidationError(f"{what} evaluates to {real:.6g}, outside [0, 1]; is the kernel a contraction?")
    return min(max(real, 0.0), 1.0)


def cylinder_prob(kernel: Kernel, include: int, exclude: int = 0) -> float:
    """
    P[A ⊆ S, B ∩ S = ∅] by the inclusion-exclusion determinant.

    Args:
        kernel: Determinantal kernel Q
        include: Mask of A
        exclude: Mask of B

    Returns:
        Probability clamped to [0, 1]

    Raises:
        DomainError: If A and B overlap
        CapacityError: If |A ∪ B| exceeds the determinant size cap
    """
    kernel.ground.check_mask(include)
    kernel.ground.check_mask(exclude)
    if include & exclude:
        raise DomainError("Include and exclude sets overlap")
    touched = popcount(include | exclude)
    if touched > MAX_CYLINDER_SIZE:
        raise CapacityError(f"Cylinder on {touched} elements exceeds the cap of {MAX_CYLINDER_SIZE}")
    if touched == 0:
        return 1.0
    block = _cylinder_matrix(kernel.entries, indices_of(include), indices_of(exclude))
    return _checked_probability(complex(scipy.linalg.det(block)), "Cylinder determinant")


def enumerate_distribution(kernel: Kernel) -> DistributionTable:
    """
    Exact law of the random set: mass[B] = P[S = B] for every B ⊆ E.

    Each elementary cylinder determinant is computed independently, in
    batches.

    Raises:
        CapacityError: If |E| > 20
    """
    ground = kernel.ground
    ground.require_enumerable()
    n = ground.size
    if n == 0:
        return DistributionTable(ground, np.ones(1))

    q = kernel.entries
    complement = np.eye(n) - q
    bits = membership_bits(n)
    mass = np.empty(1 << n)
    for start in range(0, 1 << n, ENUMERATION_CHUNK):
        chunk = bits[start:start + ENUMERATION_CHUNK]
        blocks = np.where(chunk[:, :, None], q[None, :, :], complement[None, :, :])
        values = np.linalg.det(blocks)
        if np.max(np.abs(values.imag)) > IMAGINARY_LIMIT:
            raise InternalConsistencyError("Elementary cylinder determinant has a large imaginary part")
        real = values.real
        if real.min() < NEGATIVE_DETERMINANT_LIMIT:
            raise ValidationError(
                f"Elementary probability {real.min():.6g} < 0; is the kernel a contraction?"
            )
        mass[start:start + chunk.shape[0]] = np.clip(real, 0.0, 1.0)

    total = mass.sum()
    logger.debug("Enumerated %d subsets; total mass %.15f", mass.size, total)
    if abs(total - 1) > MASS_SUM_TOL:
        raise InternalConsistencyError(f"Enumerated masses sum to {total:.12g}")
    return DistributionTable(ground, mass)


def base_prob_from_matrix(matrix: CoordinatizationMatrix, base: int) -> float:
    """
    |det M_B|^2 / det(M M*) for an r-subset B; 0 when |B| != r.
    """
    matrix.ground.check_mask(base)
    columns = indices_of(base)
    if len(columns) != matrix.rank:
        return 0.0
    if matrix.rank == 0:
        return 1.0
    minor = scipy.linalg.det(matrix.rows[:, columns])
    gram = scipy.linalg.det(matrix.rows @ matrix.rows.conj().T)
    return float(abs(minor) ** 2 / gram.real)


def entropy(kernel: Kernel) -> float:
    """Shannon entropy of the measure in nats."""
    table = enumerate_distribution(kernel)
    return float(np.sum(scipy.special.entr(table.mass)))


def tv_distance(first: DistributionTable, second: DistributionTable) -> float:
    """Total-variation distance (1/2) Σ |p - q|."""
    if first.ground != second.ground:
        raise StructuralError("Distributions live on different ground sets")
    return float(0.5 * np.abs(first.mass - second.mass).sum())


@dataclass(frozen=True)
class CountStats:
    """Mean and law of |S ∩ A|."""

    mean: float
    pmf: np.ndarray

    @property
    def size(self) -> int:
        return self.pmf.size - 1

    def tail(self, deviation: float) -> float:
        """P[| |S ∩ A| - mean | >= deviation]."""
        counts = np.arange(self.pmf.size)
        far = np.abs(counts - self.mean) >= deviation - 1e-12
        return float(self.pmf[far].sum())

    def to_dict(self) -> Dict:
        return {'mean': self.mean, 'pmf': [float(p) for p in self.pmf]}


def marginal_count_stats(kernel: Kernel, subset: int) -> CountStats:
    """
    Mean (from the diagonal) and exact law (from enumeration) of |S ∩ A|.

    Raises:
        InternalConsistencyError: If the two routes to the mean disagree
    """
    kernel.ground.check_mask(subset)
    positions = indices_of(subset)
    mean = float(np.sum(np.real(np.diag(kernel.entries))[positions]))

    table = enumerate_distribution(kernel)
    counts = membership_bits(kernel.size)[:, positions].sum(axis=1)
    pmf = np.bincount(counts, weights=table.mass, minlength=len(positions) + 1)

    enumerated_mean = float(np.arange(pmf.size) @ pmf)
    if abs(enumerated_mean - mean) > MEAN_CONSISTENCY_TOL:
        raise InternalConsistencyError(
            f"Mean from diagonal {mean:.12g} disagrees with enumeration {enumerated_mean:.12g}"
        )
    return CountStats(mean, pmf)
