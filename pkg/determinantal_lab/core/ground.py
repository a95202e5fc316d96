"""
Ground sets and bit-mask subsets.

A subset of a ground set is an ``int`` whose bit ``i`` is set when the
``i``-th label belongs to it.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from .errors import CapacityError, StructuralError

MAX_GROUND_SIZE = 62
ENUMERATION_LIMIT = 20


@dataclass(frozen=True)
class GroundSet:
    """Ordered list of distinct element labels."""

    labels: Tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(label) for label in self.labels)
        object.__setattr__(self, 'labels', labels)
        if len(set(labels)) != len(labels):
            duplicates = sorted(label for label, count in Counter(labels).items() if count > 1)
            raise StructuralError(f"Duplicate ground labels: {', '.join(duplicates)}")
        if len(labels) > MAX_GROUND_SIZE:
            raise CapacityError(
                f"Ground set has {len(labels)} elements; at most {MAX_GROUND_SIZE} are supported"
            )

    @classmethod
    def of_size(cls, n: int, prefix: str = 'e') -> 'GroundSet':
        """Ground set ``e1, ..., en``."""
        if n < 0:
            raise StructuralError(f"Ground size must be nonnegative, got {n}")
        return cls(tuple(f"{prefix}{i + 1}" for i in range(n)))

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.size) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise StructuralError(f"Unknown ground label: {label}") from None

    def mask_of(self, items: Iterable) -> int:
        """
        Build a mask from labels or integer indices.

        Args:
            items: Iterable of labels (str) or positions (int)

        Returns:
            Bit-mask of the subset
        """
        mask = 0
        for item in items:
            if isinstance(item, (int, np.integer)) and not isinstance(item, bool):
                position = int(item)
                if not 0 <= position < self.size:
                    raise StructuralError(f"Element index {position} outside ground of size {self.size}")
            else:
                position = self.index(str(item))
            mask |= 1 << position
        return mask

    def labels_of(self, mask: int) -> List[str]:
        return [self.labels[i] for i in indices_of(mask)]

    def restrict(self, keep: Sequence[int]) -> 'GroundSet':
        return GroundSet(tuple(self.labels[i] for i in keep))

    def check_mask(self, mask: int) -> None:
        if mask < 0 or mask > self.full_mask:
            raise StructuralError(f"Subset mask {mask} does not fit a ground set of size {self.size}")

    def require_enumerable(self, limit: int = ENUMERATION_LIMIT) -> None:
        if self.size > limit:
            raise CapacityError(
                f"Operation enumerates 2^{self.size} subsets; ground size must be at most {limit}"
            )


def indices_of(mask: int) -> List[int]:
    """Positions of the set bits, ascending."""
    result = []
    position = 0
    while mask:
        if mask & 1:
            result.append(position)
        mask >>= 1
        position += 1
    return result


def popcount(mask: int) -> int:
    return bin(mask).count('1')


def membership_bits(n: int) -> np.ndarray:
    """Boolean array of shape (2^n, n); row ``m`` marks the elements of mask ``m``."""
    masks = np.arange(1 << n, dtype=np.int64)
    return ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)


def mask_sizes(n: int) -> np.ndarray:
    """Cardinality of every mask in ``range(2^n)``."""
    return membership_bits(n).sum(axis=1)


def submasks(mask: int):
    """Yield every submask of ``mask``, including 0 and ``mask`` itself."""
    sub = mask
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & mask


def compress_mask(mask: int, keep: Sequence[int]) -> int:
    """Re-index ``mask`` onto the ground restricted to positions ``keep``."""
    out = 0
    for new_position, old_position in enumerate(keep):
        if mask >> old_position & 1:
            out |= 1 << new_position
    return out


def expand_mask(mask: int, keep: Sequence[int]) -> int:
    """Inverse of ``compress_mask``."""
    out = 0
    for new_position, old_position in enumerate(keep):
        if mask >> new_position & 1:
            out |= 1 << old_position
    return out
