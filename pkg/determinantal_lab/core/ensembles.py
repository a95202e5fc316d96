"""
Seeded random kernels, subspaces and graphs for experiments and tests.
"""

from typing import List, Optional, Tuple

import numpy as np

from .errors import DomainError
from .ground import GroundSet
from .kernels import Kernel, Subspace, projection_kernel
from .zoo import bernoulli, renewal_truncated, toeplitz_from_symbol, zn_character
from ..utils import linalg

ENSEMBLES = ('projection', 'contraction', 'toeplitz')


def haar_unitary(n: int, rng: np.random.Generator, real: bool = False) -> np.ndarray:
    """Haar-distributed unitary (or orthogonal) matrix via QR with phase correction."""
    if real:
        gaussian = rng.standard_normal((n, n))
    else:
        gaussian = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2)
    q, r = np.linalg.qr(gaussian)
    diagonal = np.diag(r)
    phases = diagonal / np.where(np.abs(diagonal) > 0, np.abs(diagonal), 1.0)
    return np.asarray(q * phases, dtype=complex)


def random_subspace(n: int, rank: int, rng: np.random.Generator, real: bool = False) -> Subspace:
    if not 0 <= rank <= n:
        raise DomainError(f"Rank must lie in 0..{n}, got {rank}")
    frame = haar_unitary(n, rng, real)
    return Subspace(GroundSet.of_size(n), frame[:, :rank])


def random_projection(n: int, rng: np.random.Generator, rank: Optional[int] = None,
                      real: bool = False) -> Subspace:
    """Random subspace; the rank defaults to a uniform draw from 1..n-1 (or 0..n for n < 2)."""
    if rank is None:
        rank = int(rng.integers(1, n)) if n >= 2 else int(rng.integers(0, n + 1))
    return random_subspace(n, rank, rng, real)


def random_contraction(n: int, rng: np.random.Generator, real: bool = False) -> Kernel:
    """Haar eigenbasis with a Gaussian spectrum clipped to [0, 1]."""
    spectrum = np.clip(rng.normal(0.5, 0.35, n), 0.0, 1.0)
    frame = haar_unitary(n, rng, real)
    entries = linalg.hermitize((frame * spectrum) @ frame.conj().T)
    return Kernel(GroundSet.of_size(n), entries)


def random_toeplitz(n: int, rng: np.random.Generator, degree: int = 3) -> Kernel:
    """Truncated Toeplitz kernel of a random symbol with c0 = 1/2 and Σ|c_k| <= 1/4."""
    weights = rng.dirichlet(np.ones(degree)) * rng.uniform(0.0, 0.25)
    phases = np.exp(2j * np.pi * rng.uniform(size=degree))
    return toeplitz_from_symbol(n, np.concatenate([[0.5], weights * phases]))


def random_kernel(ensemble: str, n: int, rng: np.random.Generator) -> Kernel:
    if ensemble == 'projection':
        return projection_kernel(random_projection(n, rng))
    if ensemble == 'contraction':
        return random_contraction(n, rng)
    if ensemble == 'toeplitz':
        return random_toeplitz(n, rng)
    raise DomainError(f"Unknown ensemble '{ensemble}'; choose from {', '.join(ENSEMBLES)}")


def nested_projections(n: int, rng: np.random.Generator) -> Tuple[Subspace, Subspace]:
    """H1 ⊆ H2 spanned by leading columns of one Haar frame."""
    outer = int(rng.integers(1, n + 1))
    inner = int(rng.integers(0, outer + 1))
    frame = haar_unitary(n, rng)
    ground = GroundSet.of_size(n)
    return Subspace(ground, frame[:, :inner]), Subspace(ground, frame[:, :outer])


def orthogonal_decomposition(n: int, rng: np.random.Generator, full: bool = False) -> Tuple[Subspace, Subspace]:
    """Orthogonal H1, H2 with dim H1 + dim H2 <= n (= n when ``full``)."""
    total = n if full else int(rng.integers(1, n + 1))
    first = int(rng.integers(0, total + 1))
    frame = haar_unitary(n, rng)
    ground = GroundSet.of_size(n)
    return Subspace(ground, frame[:, :first]), Subspace(ground, frame[:, first:total])


def commuting_pair(n: int, rng: np.random.Generator) -> Tuple[Kernel, Kernel]:
    """Q1 <= Q2 sharing a Haar eigenbasis, with eigenvalues λ1 <= λ2."""
    lower = rng.uniform(0.0, 1.0, n)
    upper = lower + (1.0 - lower) * rng.uniform(0.0, 1.0, n)
    frame = haar_unitary(n, rng)
    ground = GroundSet.of_size(n)
    return (
        Kernel(ground, linalg.hermitize((frame * lower) @ frame.conj().T)),
        Kernel(ground, linalg.hermitize((frame * upper) @ frame.conj().T)),
    )


def battery(seed: int = 7) -> List[Tuple[str, Kernel]]:
    """Named kernels of size at most 6 used across the test suites."""
    from .graphs import complete_graph, transfer_current

    rng = np.random.default_rng(seed)
    return [
        ('bernoulli', bernoulli(3, 0.3)),
        ('k3-transfer-current', transfer_current(complete_graph(3))),
        ('k4-transfer-current', transfer_current(complete_graph(4))),
        ('renewal', renewal_truncated(5, 0.4)),
        ('zn-character', zn_character(4, [0, 1])),
        ('contraction-4', random_contraction(4, rng)),
        ('contraction-5-real', random_contraction(5, rng, real=True)),
        ('projection-5', projection_kernel(random_projection(5, rng, rank=2))),
        ('toeplitz-5', random_toeplitz(5, rng)),
    ]
