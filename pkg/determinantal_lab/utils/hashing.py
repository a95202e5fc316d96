"""
Hashing utilities for reproducibility: kernel fingerprints and derived seeds.
"""

import hashlib

import numpy as np

from ..core.kernels import Kernel, Subspace

FINGERPRINT_DECIMALS = 12


class HashingUtils:
    """SHA-256 based fingerprints and seed derivation."""

    @staticmethod
    def sha256_hex(data: bytes) -> str:
        return hashlib.sha256(data).hexdigest()

    @staticmethod
    def _matrix_bytes(matrix: np.ndarray) -> bytes:
        # rounding keeps fingerprints stable under last-bit noise; +0.0 folds -0.0
        rounded = np.round(np.asarray(matrix, dtype=complex), FINGERPRINT_DECIMALS) + 0.0
        return (np.ascontiguousarray(rounded.real).tobytes()
                + np.ascontiguousarray(rounded.imag).tobytes())

    @staticmethod
    def kernel_fingerprint(kernel: Kernel) -> str:
        """
        SHA-256 of the labels and the entries rounded to 12 decimals.

        Args:
            kernel: Kernel to fingerprint

        Returns:
            Hexadecimal digest
        """
        digest = hashlib.sha256()
        digest.update('\x1f'.join(kernel.ground.labels).encode('utf-8'))
        digest.update(str(kernel.entries.shape).encode('ascii'))
        digest.update(HashingUtils._matrix_bytes(kernel.entries))
        return digest.hexdigest()

    @staticmethod
    def subspace_fingerprint(subspace: Subspace) -> str:
        """Fingerprint of the projector, so any orthonormal basis of H gives the same value."""
        digest = hashlib.sha256()
        digest.update('\x1f'.join(subspace.ground.labels).encode('utf-8'))
        digest.update(HashingUtils._matrix_bytes(subspace.projector()))
        return digest.hexdigest()

    @staticmethod
    def derive_seed(seed: int, suite: str, index: int) -> int:
        """
        Instance seed for (run seed, suite name, instance index).

        Returns:
            64-bit unsigned integer taken from the SHA-256 digest
        """
        material = f"{seed}:{suite}:{index}".encode('utf-8')
        return int.from_bytes(hashlib.sha256(material).digest()[:8], 'big')

