"""
Subspace arithmetic on finite coordinate spaces.

Subspaces are represented by matrices with orthonormal columns. Rank
decisions use absolute singular-value thresholding.
"""

from typing import Sequence

import numpy as np
import scipy.linalg

RANK_TOL = 1e-8


def as_complex(matrix) -> np.ndarray:
    return np.array(matrix, dtype=complex)


def orthonormal_basis(vectors: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """
    Orthonormal basis of the column span of ``vectors``.

    Args:
        vectors: n x k matrix whose columns span the subspace
        tol: Singular values at or below this are treated as zero

    Returns:
        n x r matrix with orthonormal columns
    """
    vectors = as_complex(vectors)
    if vectors.ndim == 1:
        vectors = vectors.reshape(-1, 1)
    n = vectors.shape[0]
    if vectors.shape[1] == 0 or n == 0:
        return np.zeros((n, 0), dtype=complex)
    left, singular, _ = scipy.linalg.svd(vectors, full_matrices=False)
    rank = int(np.sum(singular > tol))
    return left[:, :rank]


def qr_basis(vectors: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the column span by QR with column pivoting."""
    vectors = as_complex(vectors)
    n = vectors.shape[0]
    if vectors.shape[1] == 0 or n == 0:
        return np.zeros((n, 0), dtype=complex)
    q, r, _ = scipy.linalg.qr(vectors, mode='economic', pivoting=True)
    diagonal = np.abs(np.diag(r))
    rank = int(np.sum(diagonal > tol))
    return q[:, :rank]


def orthogonal_complement(basis: np.ndarray, n: int, tol: float = RANK_TOL) -> np.ndarray:
    """Orthonormal basis of the orthogonal complement in C^n."""
    basis = as_complex(basis).reshape(n, -1)
    if basis.shape[1] == 0:
        return np.eye(n, dtype=complex)
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    left, singular, _ = scipy.linalg.svd(basis, full_matrices=True)
    rank = int(np.sum(singular > tol))
    return left[:, rank:]


def span_sum(first: np.ndarray, second: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    return orthonormal_basis(np.hstack([as_complex(first), as_complex(second)]), tol)


def intersection(first: np.ndarray, second: np.ndarray, n: int, tol: float = RANK_TOL) -> np.ndarray:
    """Intersection as the complement of the sum of complements."""
    complements = span_sum(orthogonal_complement(first, n, tol), orthogonal_complement(second, n, tol), tol)
    return orthogonal_complement(complements, n, tol)


def coordinate_basis(n: int, positions: Sequence[int]) -> np.ndarray:
    """Columns e_i for i in ``positions`` (the subspace [A])."""
    basis = np.zeros((n, len(positions)), dtype=complex)
    for column, position in enumerate(positions):
        basis[position, column] = 1.0
    return basis


def projector(basis: np.ndarray) -> np.ndarray:
    basis = as_complex(basis)
    return basis @ basis.conj().T


def hermitize(matrix: np.ndarray) -> np.ndarray:
    return (matrix + matrix.conj().T) / 2


def psd_sqrt(matrix: np.ndarray) -> np.ndarray:
    """Principal square root of a Hermitian matrix, negative eigenvalues clamped to 0."""
    values, vectors = scipy.linalg.eigh(hermitize(as_complex(matrix)))
    roots = np.sqrt(np.clip(values, 0.0, None))
    return (vectors * roots) @ vectors.conj().T
