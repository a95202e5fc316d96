"""
Increasing events on small supports.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import FrozenSet, List, Sequence, Tuple

import numpy as np

from .errors import CapacityError, StructuralError
from .ground import GroundSet, expand_mask, indices_of, submasks

MAX_EVENT_SUPPORT = 4


@dataclass(frozen=True)
class IncreasingEvent:
    """
    Up-closed family of subsets of ``support``; a set S belongs to the event
    when S ∩ support is in ``family``. Masks in ``family`` are global.
    """

    ground: GroundSet
    support: int
    family: FrozenSet[int]

    def __post_init__(self):
        self.ground.check_mask(self.support)
        family = frozenset(int(m) for m in self.family)
        object.__setattr__(self, 'family', family)
        for member in family:
            if member & ~self.support:
                raise StructuralError("Event member lies outside the event support")
        for member in family:
            for extra in indices_of(self.support & ~member):
                if member | (1 << extra) not in family:
                    raise StructuralError("Event is not increasing")

    def contains(self, mask: int) -> bool:
        return (mask & self.support) in self.family

    def indicator(self) -> np.ndarray:
        """Boolean array over all 2^|E| masks."""
        masks = np.arange(1 << self.ground.size, dtype=np.int64)
        restricted = masks & self.support
        return np.isin(restricted, np.fromiter(self.family, dtype=np.int64, count=len(self.family)))

    def minimal_members(self) -> List[int]:
        return sorted(m for m in self.family
                      if not any(m != sub and sub in self.family for sub in submasks(m)))

    def to_dict(self) -> dict:
        return {
            'support': self.ground.labels_of(self.support),
            'minimal_members': [self.ground.labels_of(m) for m in self.minimal_members()],
        }


@lru_cache(maxsize=None)
def _monotone_families(k: int) -> Tuple[FrozenSet[int], ...]:
    if k == 0:
        return (frozenset(), frozenset({0}))
    smaller = _monotone_families(k - 1)
    top = 1 << (k - 1)
    families = []
    for without in smaller:
        for with_top in smaller:
            if without <= with_top:
                families.append(without | frozenset(m | top for m in with_top))
    return tuple(families)


def enumerate_increasing_events(k: int) -> List[FrozenSet[int]]:
    """
    All monotone Boolean functions on subsets of {0, ..., k-1}, as families
    of local masks.

    Raises:
        CapacityError: If k > 4
    """
    if k < 0:
        raise StructuralError(f"Support size must be nonnegative, got {k}")
    if k > MAX_EVENT_SUPPORT:
        raise CapacityError(f"Increasing events are enumerated on supports of at most {MAX_EVENT_SUPPORT}")
    return list(_monotone_families(k))


def events_on(ground: GroundSet, support: int) -> List[IncreasingEvent]:
    """Every increasing event with the given support."""
    positions = indices_of(support)
    return [
        IncreasingEvent(ground, support, frozenset(expand_mask(m, positions) for m in family))
        for family in enumerate_increasing_events(len(positions))
    ]


def up_closure(ground: GroundSet, support: int, generators: Sequence[int]) -> IncreasingEvent:
    """Smallest increasing event on ``support`` containing the generators."""
    family = set()
    for generator in generators:
        if generator & ~support:
            raise StructuralError("Generator lies outside the support")
        free = support & ~generator
        family.update(generator | extra for extra in submasks(free))
    return IncreasingEvent(ground, support, frozenset(family))


def random_increasing_event(ground: GroundSet, support: int, rng: np.random.Generator,
                            max_generators: int = 3) -> IncreasingEvent:
    """Up-closure of a few random subsets of the support."""
    positions = indices_of(support)
    count = int(rng.integers(0, max_generators + 1))
    generators = []
    for _ in range(count):
        local = int(rng.integers(0, 1 << len(positions)))
        generators.append(expand_mask(local, positions))
    return up_closure(ground, support, generators)


def local_indicator_matrix(k: int) -> np.ndarray:
    """Rows: events on k elements; columns: local masks; entry 1 when the mask is in the event."""
    families = enumerate_increasing_events(k)
    matrix = np.zeros((len(families), 1 << k))
    for row, family in enumerate(families):
        for mask in family:
            matrix[row, mask] = 1.0
    return matrix
