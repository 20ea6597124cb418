"""Two-qubit states: general density matrices, the Bell-diagonal family,
Schmidt-form pure states, samplers and a few simple channels."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InvalidState, NotBellDiagonal
from .linalg import (
    CLIP_TOL,
    I2,
    PAULIS,
    as_matrix,
    hermitian_eigen,
    is_hermitian,
    partial_trace,
    tensor_product,
)

TRACE_TOL = 1e-10
TETRAHEDRON_TOL = 1e-12
BELL_LABELS = ("00", "01", "10", "11")


def _bell_vector(a: int, b: int) -> np.ndarray:
    v = np.zeros(4, dtype=complex)
    v[b] = 1.0  # |0, b>
    v[2 + (1 - b)] = (-1) ** a  # |1, 1^b>
    return v / math.sqrt(2.0)


# columns are |beta_00>, |beta_01>, |beta_10>, |beta_11>
BELL_BASIS = np.column_stack([_bell_vector(a, b) for a in (0, 1) for b in (0, 1)])


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated 4x4 two-qubit density matrix (trace one, PSD)."""

    matrix: np.ndarray

    def __post_init__(self):
        m = as_matrix(self.matrix, 4)
        if not is_hermitian(m):
            raise InvalidState("density matrix is not Hermitian")
        m = 0.5 * (m + m.conj().T)
        tr = np.trace(m).real
        if abs(tr - 1.0) > TRACE_TOL:
            raise InvalidState(f"trace is {tr!r}, expected 1")
        lo = hermitian_eigen(m).values[-1]
        if lo < -CLIP_TOL:
            raise InvalidState(f"smallest eigenvalue {lo:.3e} is negative")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    def reduced(self, keep: str) -> np.ndarray:
        """Reduced state of subsystem ``keep`` ("A" or "B")."""
        return partial_trace(self.matrix, "B" if keep == "A" else "A")

    def __repr__(self):
        return f"DensityMatrix({np.array2string(self.matrix, precision=4)})"


def bell_lambdas(c1: float, c2: float, c3: float) -> tuple[float, float, float, float]:
    """Bell-basis eigenvalues (lambda_00, lambda_01, lambda_10, lambda_11)."""
    out = []
    for a in (0, 1):
        for b in (0, 1):
            sa, sb = (-1) ** a, (-1) ** b
            out.append(0.25 * (1.0 + sa * c1 - sa * sb * c2 + sb * c3))
    return tuple(out)


def correlations_from_lambdas(lam) -> tuple[float, float, float]:
    """Inverse of :func:`bell_lambdas` (the map is linear and invertible)."""
    l00, l01, l10, l11 = lam
    return (
        l00 + l01 - l10 - l11,
        -(l00 - l01 - l10 + l11),
        l00 - l01 + l10 - l11,
    )


@dataclass(frozen=True)
class BellDiagonalState:
    """Bell-diagonal state ``(I + sum_j c_j s_j x s_j) / 4``.

    Build through :func:`bell_diagonal_from_c` or :meth:`from_lambdas`;
    the constructor itself checks that ``lambdas`` matches ``c``.
    """

    c: tuple[float, float, float]
    lambdas: tuple[float, float, float, float] = field(default=None)

    def __post_init__(self):
        c = tuple(float(x) for x in self.c)
        if len(c) != 3 or not all(math.isfinite(x) for x in c):
            raise InvalidState(f"expected three finite correlations, got {self.c!r}")
        lam = bell_lambdas(*c)
        if min(lam) < -TETRAHEDRON_TOL:
            raise InvalidState(
                f"c={c} lies outside the tetrahedron (lambda={tuple(round(x, 12) for x in lam)})"
            )
        lam = tuple(max(x, 0.0) for x in lam)
        if self.lambdas is not None and max(abs(x - y) for x, y in zip(lam, self.lambdas)) > 1e-12:
            raise InvalidState("lambdas inconsistent with c")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "lambdas", lam)

    @classmethod
    def from_lambdas(cls, lam) -> "BellDiagonalState":
        lam = np.asarray(lam, dtype=float)
        if lam.shape != (4,) or abs(lam.sum() - 1.0) > TRACE_TOL:
            raise InvalidState(f"expected four weights summing to one, got {lam}")
        return cls(correlations_from_lambdas(lam))

    @property
    def lambda_max(self) -> float:
        return max(self.lambdas)

    @property
    def correlation_matrix(self) -> np.ndarray:
        return np.diag(self.c)

    def density_matrix(self) -> DensityMatrix:
        return density_matrix_of(self)


def bell_diagonal_from_c(c1: float, c2: float, c3: float) -> BellDiagonalState:
    return BellDiagonalState((c1, c2, c3))


def density_matrix_of(bd: BellDiagonalState) -> DensityMatrix:
    m = np.eye(4, dtype=complex)
    for cj, s in zip(bd.c, PAULIS):
        m = m + cj * tensor_product(s, s)
    return DensityMatrix(0.25 * m)


def in_bell_basis(m) -> np.ndarray:
    """Matrix elements of ``m`` in the (beta_00, beta_01, beta_10, beta_11) basis."""
    return BELL_BASIS.conj().T @ np.asarray(m, dtype=complex) @ BELL_BASIS


def bell_diagonal_of(rho: DensityMatrix, tol: float = 1e-9) -> BellDiagonalState:
    """Recover the Bell-diagonal parameters of ``rho``.

    Raises NotBellDiagonal when an off-diagonal Bell-basis element exceeds
    ``tol``.
    """
    b = in_bell_basis(rho.matrix)
    off = b - np.diag(np.diag(b))
    if np.max(np.abs(off)) > tol:
        raise NotBellDiagonal("state has coherences between Bell states")
    lam = np.diag(b).real
    return BellDiagonalState(correlations_from_lambdas(lam / lam.sum()))


def correlation_matrix(rho) -> np.ndarray:
    """``T_ij = tr(rho s_i x s_j)`` for a two-qubit state."""
    m = getattr(rho, "matrix", rho)
    return np.array(
        [[np.trace(m @ tensor_product(si, sj)).real for sj in PAULIS] for si in PAULIS]
    )


@dataclass(frozen=True)
class PureSchmidtState:
    """``alpha|00> + beta|11>`` with ``beta = sqrt(1 - alpha^2)``."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not 0.0 <= a <= 1.0:
            raise InvalidState(f"alpha must lie in [0, 1], got {a}")
        object.__setattr__(self, "alpha", a)

    @property
    def beta(self) -> float:
        return math.sqrt(max(0.0, 1.0 - self.alpha**2))

    def ket(self) -> np.ndarray:
        return np.array([self.alpha, 0.0, 0.0, self.beta], dtype=complex)

    def density_matrix(self) -> DensityMatrix:
        v = self.ket()
        return DensityMatrix(np.outer(v, v.conj()))


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    return np.random.default_rng(seed_or_rng)


def sample_bell_diagonal(rng) -> BellDiagonalState:
    """Bell-diagonal state with spectrum uniform on the 3-simplex.

    ``rng`` is a ``numpy.random.Generator`` owned by the caller, or a seed.
    """
    e = _rng(rng).exponential(size=4)
    return BellDiagonalState.from_lambdas(e / e.sum())


def random_density_matrix(rng, rank: int = 4) -> DensityMatrix:
    """Ginibre-distributed random state of the given rank."""
    g = _rng(rng).standard_normal((4, rank, 2)) @ np.array([1.0, 1j])
    m = g @ g.conj().T
    return DensityMatrix(m / np.trace(m).real)


def random_unitary(rng, dim: int = 2) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = _rng(rng).standard_normal((dim, dim, 2)) @ np.array([1.0, 1j])
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def local_unitary(rho: DensityMatrix, u, v) -> DensityMatrix:
    w = tensor_product(u, v)
    return DensityMatrix(w @ rho.matrix @ w.conj().T)


def mix(rho1: DensityMatrix, rho2: DensityMatrix, x: float) -> DensityMatrix:
    return DensityMatrix(x * rho1.matrix + (1.0 - x) * rho2.matrix)


def depolarize(rho: DensityMatrix, p: float) -> DensityMatrix:
    """Global depolarizing channel ``(1-p) rho + p I/4``."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"depolarizing probability must lie in [0, 1], got {p}")
    return DensityMatrix((1.0 - p) * rho.matrix + p * np.eye(4) / 4.0)


def reattach_maximally_mixed(rho: DensityMatrix, keep: str = "A") -> DensityMatrix:
    """Discard one qubit and replace it by ``I/2`` (a CPTP map)."""
    if keep == "A":
        return DensityMatrix(tensor_product(rho.reduced("A"), I2 / 2))
    return DensityMatrix(tensor_product(I2 / 2, rho.reduced("B")))


def dephase(rho: DensityMatrix) -> DensityMatrix:
    """Diagonal part in the computational basis."""
    return DensityMatrix(np.diag(np.diag(rho.matrix)))
