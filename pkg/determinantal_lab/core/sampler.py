"""
Exact sampling by sequential conditioning.

Elements are visited one at a time. The current element is included with
probability equal to its current diagonal entry, and the remaining block is
updated by the corresponding Schur complement (inclusion) or dual Schur
complement (exclusion).

Each draw uses its own Philox substream keyed by the run seed, with the
draw index in the counter, so draw i is the same whatever else is drawn.
"""

import logging
import time
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import scipy.stats

from .errors import DomainError, InternalConsistencyError, StructuralError
from .ground import GroundSet, indices_of
from .kernels import Kernel, ensure_valid
from .measure import DistributionTable

logger = logging.getLogger(__name__)

DEFAULT_SEED = 20240601
PIVOT_EPS = 1e-12
DIAGONAL_SLACK = 1e-8
MIN_EXPECTED = 5.0
SEED_LIMIT = 1 << 64


@dataclass(frozen=True)
class SampleRun:
    """Outcome masks of a seeded batch of draws."""

    ground: GroundSet
    seed: int
    count: int
    outcomes: Tuple[int, ...]
    elapsed: float
    visit_order: Optional[Tuple[int, ...]] = None
    randomized_order: bool = False

    def to_lines(self) -> List[str]:
        return [','.join(self.ground.labels_of(mask)) for mask in self.outcomes]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'draw': np.arange(self.count),
            'mask': list(self.outcomes),
            'subset': self.to_lines(),
        })

    def summary(self) -> Dict:
        """Deterministic description of the run (elapsed time excluded)."""
        frequencies = site_frequencies(self)
        sizes = [bin(mask).count('1') for mask in self.outcomes]
        return {
            'labels': list(self.ground.labels),
            'seed': self.seed,
            'count': self.count,
            'randomized_order': self.randomized_order,
            'distinct_outcomes': len(set(self.outcomes)),
            'mean_size': float(np.mean(sizes)),
            'site_frequencies': {label: float(f) for label, f in zip(self.ground.labels, frequencies)},
        }


def draw_generator(seed: int, draw_index: int) -> np.random.Generator:
    """Philox substream for draw ``draw_index`` of a run seeded by ``seed``."""
    if not 0 <= seed < SEED_LIMIT:
        raise DomainError(f"Seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.Philox(key=seed, counter=draw_index << 128))


def _check_order(order: Optional[Sequence[int]], n: int) -> List[int]:
    if order is None:
        return list(range(n))
    order = [int(i) for i in order]
    if sorted(order) != list(range(n)):
        raise StructuralError(f"Visit order must be a permutation of 0..{n - 1}")
    return order


def _draw(entries: np.ndarray, uniforms: np.ndarray, order: Sequence[int], debug: bool) -> int:
    q = np.array(entries)[np.ix_(order, order)]
    outcome = 0
    for step, element in enumerate(order):
        pivot = q[0, 0].real
        column = q[1:, 0]
        row = q[0, 1:]
        rest = q[1:, 1:]
        if abs(pivot) <= PIVOT_EPS:
            include = False
            q = rest
        elif abs(1 - pivot) <= PIVOT_EPS:
            include = True
            q = rest
        else:
            include = uniforms[step] < min(max(pivot, 0.0), 1.0)
            if include:
                q = rest - np.outer(column, row) / pivot
            else:
                q = rest + np.outer(column, row) / (1 - pivot)
        if include:
            outcome |= 1 << element
        if debug and q.size:
            diagonal = np.real(np.diag(q))
            if diagonal.min() < -DIAGONAL_SLACK or diagonal.max() > 1 + DIAGONAL_SLACK:
                raise InternalConsistencyError(
                    f"Diagonal left [0, 1] after visiting element {element}: "
                    f"[{diagonal.min():.3e}, {diagonal.max():.3e}]"
                )
    return outcome


def sample_one(kernel: Kernel, rng: np.random.Generator, order: Optional[Sequence[int]] = None,
               debug: bool = False, check: bool = True) -> int:
    """
    Draw one random set from P^Q.

    Args:
        kernel: Valid kernel
        rng: Source of uniforms; one uniform is consumed per element
        order: Visit order (a permutation of positions); ground order by default
        debug: Check intermediate diagonals after each update
        check: Validate the kernel first

    Returns:
        Outcome as a bit-mask
    """
    if check:
        ensure_valid(kernel)
    visit = _check_order(order, kernel.size)
    uniforms = rng.random(kernel.size)
    return int(_draw(kernel.entries, uniforms, visit, debug))


def sample_many(kernel: Kernel, n: int, seed: int = DEFAULT_SEED, order: Optional[Sequence[int]] = None,
                randomize_order: bool = False, debug: bool = False) -> SampleRun:
    """
    Draw ``n`` independent random sets with bit-exact replay.

    With ``randomize_order`` each draw first permutes the visit order using
    its own substream.

    Raises:
        DomainError: If n < 1 or the seed is out of range
    """
    if n < 1:
        raise DomainError(f"Sample count must be at least 1, got {n}")
    ensure_valid(kernel)
    size = kernel.size
    base_order = _check_order(order, size)
    entries = np.array(kernel.entries)

    started = time.perf_counter()
    outcomes = []
    for index in range(n):
        rng = draw_generator(seed, index)
        visit = [int(i) for i in rng.permutation(base_order)] if randomize_order else base_order
        outcomes.append(_draw(entries, rng.random(size), visit, debug))
    elapsed = time.perf_counter() - started
    logger.info("Drew %d samples on %d elements in %.2fs", n, size, elapsed)

    return SampleRun(
        ground=kernel.ground,
        seed=seed,
        count=n,
        outcomes=tuple(outcomes),
        elapsed=elapsed,
        visit_order=None if order is None else tuple(base_order),
        randomized_order=randomize_order,
    )


def empirical_table(run: SampleRun) -> DistributionTable:
    """Normalized outcome counts."""
    run.ground.require_enumerable()
    if run.count < 1 or not run.outcomes:
        raise DomainError("Cannot build an empirical table from an empty run")
    counts = np.bincount(np.asarray(run.outcomes, dtype=np.int64), minlength=1 << run.ground.size)
    return DistributionTable(run.ground, counts / counts.sum(), sample_count=int(counts.sum()))


def site_frequencies(run: SampleRun) -> np.ndarray:
    """Fraction of draws containing each element."""
    outcomes = np.asarray(run.outcomes, dtype=np.int64)
    positions = np.arange(run.ground.size, dtype=np.int64)
    return ((outcomes[:, None] >> positions) & 1).mean(axis=0)


def gap_statistics(run: SampleRun, start: int, stop: int) -> Tuple[float, int]:
    """
    Mean distance from a point at position i, start <= i < stop, to the next
    point of the same draw.

    Returns:
        (mean gap, number of gaps observed)
    """
    total = 0
    observed = 0
    for mask in run.outcomes:
        points = indices_of(mask)
        for left, right in zip(points, points[1:]):
            if start <= left < stop:
                total += right - left
                observed += 1
    if observed == 0:
        return float('nan'), 0
    return total / observed, observed


def chisquare_gof(empirical: DistributionTable, exact: DistributionTable,
                  count: Optional[int] = None) -> Tuple[float, int, float]:
    """
    Pearson chi-square goodness of fit of observed counts against exact masses.

    Cells whose expected count is below 5 are pooled into one "other" cell.

    Args:
        empirical: Empirical table (its sample_count gives the number of draws)
        exact: Exact law
        count: Number of draws, when the empirical table does not carry it

    Returns:
        (statistic, degrees of freedom, upper-tail p-value)
    """
    if empirical.ground != exact.ground:
        raise StructuralError("Distributions live on different ground sets")
    draws = count if count is not None else empirical.sample_count
    if not draws:
        raise DomainError("The number of draws is unknown")

    observed = empirical.mass * draws
    expected = exact.mass * draws
    large = expected >= MIN_EXPECTED
    observed_cells = list(observed[large])
    expected_cells = list(expected[large])
    pooled_observed = observed[~large].sum()
    pooled_expected = expected[~large].sum()
    if pooled_expected > 0 or pooled_observed > 0:
        observed_cells.append(pooled_observed)
        expected_cells.append(pooled_expected)

    dof = len(expected_cells) - 1
    if dof <= 0:
        return 0.0, 0, 1.0
    observed_cells = np.array(observed_cells)
    expected_cells = np.array(expected_cells)
    if np.any((expected_cells == 0) & (observed_cells > 0)):
        return float('inf'), dof, 0.0
    expected_cells = expected_cells * observed_cells.sum() / expected_cells.sum()
    result = scipy.stats.chisquare(observed_cells, expected_cells)
    return float(result.statistic), dof, float(result.pvalue)
