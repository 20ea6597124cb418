"""Relative entropy, classical KL on spectra, fidelity and Bures distance.

All logarithms are base 2.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import clip_spectrum, hermitian_eigen, sqrtm_psd, xlog2x

# overlap of rho with the kernel of sigma above which S(rho||sigma) = +inf
SUPPORT_TOL = 1e-8
# sigma eigenvalues at or below this count as exact zeros
KERNEL_TOL = 1e-13


@dataclass(frozen=True)
class DivergenceValue:
    value: float
    finite: bool = True

    @classmethod
    def infinite(cls) -> "DivergenceValue":
        return cls(float("inf"), False)

    def __float__(self):
        return self.value


def relative_entropy(rho, sigma) -> DivergenceValue:
    """``S(rho||sigma) = tr(rho log rho) - tr(rho log sigma)`` in bits."""
    r = getattr(rho, "matrix", rho)
    s = getattr(sigma, "matrix", sigma)
    neg_entropy = float(np.sum(xlog2x(clip_spectrum(hermitian_eigen(r).values))))
    eig = hermitian_eigen(s)
    vals = clip_spectrum(eig.values)
    # populations of rho along sigma's eigenvectors
    pops = np.einsum("ji,jk,ki->i", eig.vectors.conj(), r, eig.vectors).real
    kernel = vals <= KERNEL_TOL
    if np.any(pops[kernel] > SUPPORT_TOL):
        return DivergenceValue.infinite()
    cross = float(np.sum(pops[~kernel] * np.log2(vals[~kernel])))
    return DivergenceValue(max(neg_entropy - cross, 0.0))


def _check_simplex(p, name):
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-10:
        raise DomainError(f"{name} is not a probability vector: {p}")
    return p


def kl_spectrum(p, q) -> DivergenceValue:
    """Classical relative entropy ``sum p_i log2(p_i/q_i)``."""
    p = _check_simplex(p, "p")
    q = _check_simplex(q, "q")
    if p.shape != q.shape:
        raise DomainError("p and q have different lengths")
    if np.any((p > 1e-12) & (q < 1e-15)):
        return DivergenceValue.infinite()
    m = (p > 0) & (q > 0)
    return DivergenceValue(float(np.sum(p[m] * np.log2(p[m] / q[m]))))


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``[tr sqrt(sqrt(sigma) rho sqrt(sigma))]^2``.

    Evaluated as the squared trace norm of ``sqrt(rho) sqrt(sigma)``, which
    is the same number but symmetric by construction and does not take
    square roots of round-off eigenvalues.
    """
    a = sqrtm_psd(getattr(rho, "matrix", rho))
    b = sqrtm_psd(getattr(sigma, "matrix", sigma))
    f = float(np.sum(np.linalg.svd(a @ b, compute_uv=False)) ** 2)
    return min(max(f, 0.0), 1.0)


def bures_distance(rho, sigma) -> float:
    """``2 - 2 sqrt(F)``, the Bures-type divergence built on fidelity."""
    return 2.0 - 2.0 * np.sqrt(fidelity(rho, sigma))
