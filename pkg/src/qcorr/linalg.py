"""Fixed-size complex linear algebra for two-qubit states.

Everything here works on dense 2x2 and 4x4 ``numpy`` arrays. The 4x4
ordering is the usual Kronecker one: index ``2*i + k`` addresses
``|i>_A |k>_B``.
"""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import InvalidState, NonHermitianInput

HERMITIAN_TOL = 1e-12
# eigenvalues in [-CLIP_TOL, 0] are round-off; anything below is unphysical
CLIP_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


class Spectrum(NamedTuple):
    """Eigenvalues sorted descending, eigenvectors as matching columns."""

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def as_matrix(m, size: int | None = None) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if size is not None and a.shape[0] != size:
        raise ValueError(f"expected a {size}x{size} matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    return a


def is_hermitian(m, tol: float = HERMITIAN_TOL) -> bool:
    a = np.asarray(m)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= tol)


def hermitian_eigen(m, tol: float = HERMITIAN_TOL) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending.

    Raises
    ------
    NonHermitianInput
        If ``m`` differs from its conjugate transpose by more than ``tol``
        in any entry.
    """
    a = as_matrix(m)
    if not is_hermitian(a, tol):
        raise NonHermitianInput("matrix is not Hermitian within %g" % tol)
    # symmetrize so LAPACK sees exactly Hermitian input
    values, vectors = np.linalg.eigh(0.5 * (a + a.conj().T))
    return Spectrum(values[::-1].copy(), vectors[:, ::-1].copy())


def tensor_product(a, b) -> np.ndarray:
    """Kronecker product, ``(a x b)[2i+k, 2j+l] = a[i,j] * b[k,l]``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(m, subsystem: str) -> np.ndarray:
    """Trace out subsystem ``"A"`` or ``"B"`` of a 4x4 operator."""
    t = as_matrix(m, 4).reshape(2, 2, 2, 2)
    if subsystem == "A":
        return np.einsum("ikil->kl", t)
    if subsystem == "B":
        return np.einsum("ikjk->ij", t)
    raise ValueError(f"subsystem must be 'A' or 'B', got {subsystem!r}")


def clip_spectrum(values, tol: float = CLIP_TOL) -> np.ndarray:
    """Zero out round-off negatives; reject genuinely negative eigenvalues."""
    v = np.asarray(values, dtype=float)
    if np.any(v < -tol):
        raise InvalidState(f"eigenvalue {v.min():.3e} below -{tol:g}")
    return np.where(v < 0.0, 0.0, v)


def xlog2x(p) -> np.ndarray:
    """Elementwise ``p*log2(p)`` with ``0*log 0 = 0``."""
    p = np.asarray(p, dtype=float)
    out = np.zeros_like(p)
    pos = p > 0
    out[pos] = p[pos] * np.log2(p[pos])
    return out


def shannon_entropy(p) -> float:
    """Entropy in bits of a probability vector (or a clipped spectrum)."""
    return float(-np.sum(xlog2x(clip_spectrum(p))))


def binary_entropy(x: float) -> float:
    return shannon_entropy([x, 1.0 - x])


def von_neumann_entropy(rho) -> float:
    """``-tr(rho log2 rho)`` in bits; accepts a DensityMatrix or an array."""
    m = getattr(rho, "matrix", rho)
    return shannon_entropy(hermitian_eigen(m).values)


def sqrtm_psd(m) -> np.ndarray:
    """Square root of a positive semidefinite Hermitian matrix."""
    eig = hermitian_eigen(m)
    root = np.sqrt(clip_spectrum(eig.values))
    return (eig.vectors * root) @ eig.vectors.conj().T
