"""
Named kernel constructors.
"""

from typing import Iterable, List, Sequence

import numpy as np
import scipy.linalg

from .errors import DomainError, ValidationError
from .ground import GroundSet
from .kernels import DEFAULT_TOLERANCE, Kernel, Subspace, validate

SYMBOL_GRID = 512


def bernoulli(n: int, p: float) -> Kernel:
    """Product measure: each element present independently with probability p."""
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    return Kernel(GroundSet.of_size(n), p * np.eye(n))


def renewal_truncated(n: int, a: float) -> Kernel:
    """
    Principal n x n block of R(i, j) = (1-a)/(1+a) * a^|j-i|.

    Restricted to {0, ..., n-1}, this is the law of a renewal process whose
    gaps are one more than the number of tails before two heads.
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if not 0 < a < 1:
        raise DomainError(f"a must lie in (0, 1), got {a}")
    positions = np.arange(n)
    distance = np.abs(positions[:, None] - positions[None, :])
    entries = (1 - a) / (1 + a) * np.power(a, distance)
    return Kernel(GroundSet.of_size(n, prefix='s'), entries)


def renewal_gap_pmf(a: float, gap: int) -> float:
    """P[gap = g] = g a^(g-1) (1-a)^2 for the renewal kernel."""
    if gap < 1:
        return 0.0
    return gap * a ** (gap - 1) * (1 - a) ** 2


def symbol_values(coefficients: Sequence[complex], grid: int = SYMBOL_GRID) -> np.ndarray:
    """Values of f(θ) = c0 + 2 Re Σ_{k≥1} c_k e^{ikθ} on an even grid."""
    c = np.asarray(coefficients, dtype=complex)
    theta = 2 * np.pi * np.arange(grid) / grid
    k = np.arange(1, c.size)
    tail = np.exp(1j * np.outer(theta, k)) @ c[1:] if c.size > 1 else np.zeros(grid)
    return np.real(c[0]) + 2 * np.real(tail)


def _toeplitz(n: int, coefficients: Sequence[complex]) -> np.ndarray:
    c = np.zeros(n, dtype=complex)
    given = np.asarray(coefficients, dtype=complex)[:n]
    c[:given.size] = given
    # entry (j, k) is c_{k-j}, with c_{-k} = conj(c_k)
    return scipy.linalg.toeplitz(np.conj(c), c)


def toeplitz_from_symbol(n: int, coefficients: Sequence[complex]) -> Kernel:
    """
    Truncated Toeplitz kernel of a symbol given by its Fourier coefficients.

    Args:
        n: Size of the truncation
        coefficients: c_0, c_1, ..., c_m; negative indices are conjugates

    Raises:
        DomainError: If c_0 is not real or the symbol leaves [0, 1]
    """
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    c = np.asarray(list(coefficients), dtype=complex)
    if c.size == 0:
        raise DomainError("At least the zeroth Fourier coefficient is required")
    if abs(c[0].imag) > 1e-12:
        raise DomainError("The zeroth Fourier coefficient must be real")
    values = symbol_values(c)
    if values.min() < -DEFAULT_TOLERANCE or values.max() > 1 + DEFAULT_TOLERANCE:
        raise DomainError(
            f"Symbol takes values in [{values.min():.4g}, {values.max():.4g}], outside [0, 1]"
        )
    return Kernel(GroundSet.of_size(n, prefix='s'), _toeplitz(n, c))


def arc_coefficients(n: int, start: float, end: float) -> np.ndarray:
    """Fourier coefficients c_0..c_{n-1} of the indicator of [start, end) on R/Z."""
    length = end - start
    c = np.empty(n, dtype=complex)
    c[0] = length
    k = np.arange(1, n)
    c[1:] = (np.exp(-2j * np.pi * k * start) - np.exp(-2j * np.pi * k * end)) / (2j * np.pi * k)
    return c


def toeplitz_from_arc(n: int, start: float, end: float) -> Kernel:
    """Truncated Toeplitz kernel of the indicator of an arc of the circle."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    if not 0 < end - start <= 1:
        raise DomainError(f"Arc length must lie in (0, 1], got {end - start}")
    kernel = Kernel(GroundSet.of_size(n, prefix='s'), _toeplitz(n, arc_coefficients(n, start, end)))
    report = validate(kernel)
    if not report.passed:
        raise ValidationError("Arc kernel failed validation: " + "; ".join(report.problems))
    return kernel


def _frequencies(n: int, frequencies: Iterable[int]) -> List[int]:
    chosen = sorted({int(k) for k in frequencies})
    bad = [k for k in chosen if not 0 <= k < n]
    if bad:
        raise DomainError(f"Frequencies must lie in 0..{n - 1}, got {bad}")
    return chosen


def zn_ground(n: int) -> GroundSet:
    return GroundSet(tuple(f"z{m}" for m in range(n)))


def character_matrix(n: int) -> np.ndarray:
    """Columns are the normalized characters m -> e^{2πikm/n} / sqrt(n)."""
    m = np.arange(n)
    return np.exp(2j * np.pi * np.outer(m, m) / n) / np.sqrt(n)


def zn_character_subspace(n: int, frequencies: Iterable[int]) -> Subspace:
    chosen = _frequencies(n, frequencies)
    return Subspace(zn_ground(n), character_matrix(n)[:, chosen])


def zn_character(n: int, frequencies: Iterable[int]) -> Kernel:
    """Projection onto the span of the characters indexed by ``frequencies``."""
    if n < 1:
        raise DomainError(f"n must be positive, got {n}")
    chosen = _frequencies(n, frequencies)
    m = np.arange(n)
    difference = m[:, None] - m[None, :]
    entries = np.zeros((n, n), dtype=complex)
    for k in chosen:
        entries += np.exp(2j * np.pi * k * difference / n)
    return Kernel(zn_ground(n), entries / n)
