"""Numerical relative-entropy minimizers over structured state sets.

These do not use the Bell-diagonal closed forms; they search the sets
directly and are used both as oracles for the closed forms and as upper
bounds where no closed form exists.

* discord: minimum over local product bases, with the optimal classical
  probability table (the measured one) eliminated analytically.
* entanglement: minimum over a K-term mixture of pure product states.
* steering / nonlocality: minimum over Bell-diagonal states satisfying the
  two-measurement steering (equivalently CHSH) criterion.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .closed_form import CRITERION_TOL, MeasureReport, max_chsh_value
from .divergences import kl_spectrum, relative_entropy
from .errors import OptimizerFailure
from .linalg import PAULIS, von_neumann_entropy
from .optimize import OptimizerConfig, RunResult, best_of, multistart, nelder_mead, nelder_mead_run
from .states import (
    BellDiagonalState,
    DensityMatrix,
    correlation_matrix,
    correlations_from_lambdas,
    dephase,
)

__all__ = [
    "OptimizerConfig",
    "ProductBasisParams",
    "SeparableAnsatz",
    "discord_search",
    "discord_variational",
    "measure_report_general",
    "nelder_mead",
    "nonlocality_bound_bd",
    "ree_search",
    "ree_upper_bound",
    "steering_bound_bd",
]

LN2 = math.log(2.0)


def _bloch(theta, phi):
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


# --------------------------------------------------------------------- discord


@dataclass(frozen=True)
class ProductBasisParams:
    """Local measurement axes as Bloch angles; the basis on each side is the
    eigenbasis of ``n . sigma``."""

    theta_a: float
    phi_a: float
    theta_b: float
    phi_b: float

    @classmethod
    def from_vector(cls, x) -> "ProductBasisParams":
        ta, pa, tb, pb = (float(v) for v in x)
        # fold into theta in [0, pi], phi in [0, 2 pi)
        def canon(t, p):
            t = math.fmod(t, 2 * math.pi)
            if t < 0:
                t += 2 * math.pi
            if t > math.pi:
                t, p = 2 * math.pi - t, p + math.pi
            return t, math.fmod(p, 2 * math.pi) % (2 * math.pi)

        return cls(*canon(ta, pa), *canon(tb, pb))

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return _bloch(self.theta_a, self.phi_a), _bloch(self.theta_b, self.phi_b)

    def projectors(self) -> list[np.ndarray]:
        """The four product projectors ``|ij><ij|``, ordered (++, +-, -+, --)."""
        na, nb = self.axes()
        local = []
        for n in (na, nb):
            ns = sum(k * s for k, s in zip(n, PAULIS))
            local.append([(np.eye(2) + sgn * ns) / 2 for sgn in (1, -1)])
        return [np.kron(pa, pb) for pa in local[0] for pb in local[1]]


def _measured_entropy_fn(rho: DensityMatrix):
    """Entropy of the product-basis outcome distribution as a function of
    the four Bloch angles, from the local Bloch vectors and correlations."""
    m = rho.matrix
    a = [float(np.trace(m @ np.kron(s, np.eye(2))).real) for s in PAULIS]
    b = [float(np.trace(m @ np.kron(np.eye(2), s)).real) for s in PAULIS]
    t = correlation_matrix(rho).tolist()
    sin, cos, log2 = math.sin, math.cos, math.log2

    def h(x):
        ta, pa, tb, pb = x
        sa = sin(ta)
        na = (sa * cos(pa), sa * sin(pa), cos(ta))
        sb = sin(tb)
        nb = (sb * cos(pb), sb * sin(pb), cos(tb))
        ea = a[0] * na[0] + a[1] * na[1] + a[2] * na[2]
        eb = b[0] * nb[0] + b[1] * nb[1] + b[2] * nb[2]
        tb_ = [t[i][0] * nb[0] + t[i][1] * nb[1] + t[i][2] * nb[2] for i in range(3)]
        eab = na[0] * tb_[0] + na[1] * tb_[1] + na[2] * tb_[2]
        out = 0.0
        for p in (
            0.25 * (1 + ea + eb + eab),
            0.25 * (1 + ea - eb - eab),
            0.25 * (1 - ea + eb - eab),
            0.25 * (1 - ea - eb + eab),
        ):
            if p > 0:
                out -= p * log2(p)
        return out

    return h


def _angle_starts(rng: np.random.Generator, count: int, pairs: int) -> list[np.ndarray]:
    starts = []
    for _ in range(count):
        x = np.empty(2 * pairs)
        # cos(theta) uniform gives isotropic axes
        x[0::2] = np.arccos(rng.uniform(-1.0, 1.0, pairs))
        x[1::2] = rng.uniform(0.0, 2 * math.pi, pairs)
        starts.append(x)
    return starts


def discord_search(rho: DensityMatrix, cfg: OptimizerConfig) -> tuple[float, ProductBasisParams]:
    """Relative entropy of discord and the optimal product basis.

    For a fixed product basis the nearest classically correlated state is
    the dephased ``rho``, so the distance is ``H(measured) - S(rho)``.
    """
    h = _measured_entropy_fn(rho)
    starts = _angle_starts(cfg.rng(), cfg.restarts, 2)
    best = multistart(h, starts, cfg, step=0.4)
    value = best.fun - von_neumann_entropy(rho)
    return max(value, 0.0), ProductBasisParams.from_vector(best.x)


def discord_variational(rho: DensityMatrix, cfg: OptimizerConfig) -> float:
    return discord_search(rho, cfg)[0]


# ------------------------------------------------------------------ entanglement

# Pauli products sigma_mu x sigma_nu, flat index 4*mu + nu, sigma_0 = I
_PAULI4 = (np.eye(2, dtype=complex),) + PAULIS
_PRODUCT_BASIS = np.array([np.kron(p, q) for p in _PAULI4 for q in _PAULI4]).reshape(16, 16)
_CORR_SLOTS = [5, 6, 7, 9, 10, 11, 13, 14, 15]


@dataclass(frozen=True)
class SeparableAnsatz:
    """``sum_k w_k |a_k><a_k| x |b_k><b_k|`` with pure local states given by
    Bloch angles; ``bloch_angles`` rows are ``(theta_a, phi_a, theta_b, phi_b)``."""

    weights: np.ndarray
    bloch_angles: np.ndarray

    @property
    def K(self) -> int:
        return len(self.weights)

    @classmethod
    def from_vector(cls, x, K: int) -> "SeparableAnsatz":
        x = np.asarray(x, dtype=float)
        raw = x[:K]
        w = raw * raw / (raw @ raw)
        return cls(w, x[K:].reshape(4, K).T.copy())

    def density_matrix(self) -> DensityMatrix:
        return DensityMatrix(_ansatz_matrix(self.weights, self.bloch_angles.T))


def _ansatz_coefficients(w, angles):
    """Pauli coefficients of the ansatz state (times 4) plus the local Bloch vectors."""
    a = _bloch(angles[0], angles[1])
    b = _bloch(angles[2], angles[3])
    coef = np.empty(16)
    coef[0] = 1.0
    coef[1:4] = b @ w
    coef[4::4] = a @ w
    coef[_CORR_SLOTS] = ((a * w) @ b.T).ravel()
    return coef, a, b


def _ansatz_matrix(w, angles) -> np.ndarray:
    coef, _, _ = _ansatz_coefficients(w, angles)
    return 0.25 * (coef @ _PRODUCT_BASIS).reshape(4, 4)


def _ree_objective(rho: DensityMatrix, K: int):
    """Value and gradient of ``S(rho || sigma(x))`` for the flat ansatz vector
    ``x = (raw weights, theta_a, phi_a, theta_b, phi_b)``.

    The derivative of ``log sigma`` uses the divided-difference (Daleckii-Krein)
    formula in sigma's eigenbasis.
    """
    r = rho.matrix
    neg_entropy = -von_neumann_entropy(rho)

    def fg(x):
        raw = x[:K]
        ang = x[K:].reshape(4, K)
        s = raw @ raw
        w = raw * raw / s
        coef, a, b = _ansatz_coefficients(w, ang)
        sigma = 0.25 * (coef @ _PRODUCT_BASIS).reshape(4, 4)
        ev, u = np.linalg.eigh(sigma)
        ev = np.maximum(ev, 1e-300)
        rr = u.conj().T @ r @ u
        lg = np.log(ev)
        f = neg_entropy - float(np.real(np.diag(rr)) @ lg) / LN2

        d = ev[:, None] - ev[None, :]
        same = np.abs(d) <= 1e-12 * np.maximum(ev[:, None], ev[None, :])
        gam = np.where(same, 1.0 / np.maximum(ev[:, None], ev[None, :]),
                       (lg[:, None] - lg[None, :]) / np.where(same, 1.0, d))
        g_mat = -(u @ (rr * gam) @ u.conj().T) / LN2
        # g[p] = tr(G P_p) / 4 = derivative with respect to coef[p]
        g = 0.25 * np.real(_PRODUCT_BASIS @ g_mat.T.ravel())
        g_a, g_b = g[4::4], g[1:4]
        g_t = g[_CORR_SLOTS].reshape(3, 3)
        tb, ta = g_t @ b, g_t.T @ a
        g_w = g[0] + g_a @ a + g_b @ b + np.sum(a * tb, axis=0)
        g_raw = 2.0 * raw / s * (g_w - w @ g_w)
        da = w * (g_a[:, None] + tb)
        db = w * (g_b[:, None] + ta)
        grads = [g_raw]
        for dv, th, ph in ((da, ang[0], ang[1]), (db, ang[2], ang[3])):
            st, ct, sp, cp = np.sin(th), np.cos(th), np.sin(ph), np.cos(ph)
            grads.append(dv[0] * ct * cp + dv[1] * ct * sp - dv[2] * st)
            grads.append(st * (dv[1] * cp - dv[0] * sp))
        return f, np.concatenate(grads)

    return fg


def _lbfgs(fg, x0, max_iterations, ftol) -> RunResult:
    res = minimize(fg, x0, jac=True, method="L-BFGS-B",
                   options={"maxiter": max_iterations, "ftol": ftol, "gtol": 1e-9})
    # status 1: iteration limit; 2: line search stalled at machine precision
    return RunResult(res.x, float(res.fun), res.status != 1, int(res.nit))


def ree_search(rho: DensityMatrix, ansatz_K: int, cfg: OptimizerConfig) -> tuple[float, SeparableAnsatz]:
    """Best separable ansatz for ``rho`` and its exact relative entropy.

    Every restart runs L-BFGS-B on the analytic gradient down to
    ``cfg.screen_tolerance``; the best one is then polished to
    ``cfg.tolerance`` (both are relative function-decrease thresholds).
    """
    if ansatz_K < 4:
        raise ValueError("ansatz_K must be >= 4")
    K = ansatz_K
    fg = _ree_objective(rho, K)
    rng = cfg.rng()
    results = []
    for _ in range(cfg.restarts):
        x0 = np.concatenate([
            rng.uniform(0.5, 1.0, K),
            np.arccos(rng.uniform(-1.0, 1.0, K)), rng.uniform(0.0, 2 * math.pi, K),
            np.arccos(rng.uniform(-1.0, 1.0, K)), rng.uniform(0.0, 2 * math.pi, K),
        ])
        results.append(_lbfgs(fg, x0, cfg.max_iterations, max(cfg.screen_tolerance, cfg.tolerance)))
    best = best_of(results, cfg.max_iterations)
    polished = _lbfgs(fg, best.x, cfg.max_iterations, cfg.tolerance)
    if polished.fun < best.fun:
        best = polished
    ansatz = SeparableAnsatz.from_vector(best.x, K)
    value = relative_entropy(rho, ansatz.density_matrix())
    return value.value, ansatz


def ree_upper_bound(rho: DensityMatrix, ansatz_K: int = 16, cfg: OptimizerConfig | None = None) -> float:
    """Upper bound on the relative entropy of entanglement of ``rho``."""
    if cfg is None:
        raise ValueError("an OptimizerConfig with an explicit seed is required")
    return ree_search(rho, ansatz_K, cfg)[0]


# ---------------------------------------------------- steering and nonlocality

_SCREEN_PENALTIES = (1e2, 1e4)
_POLISH_PENALTIES = (1e6, 1e8, 1e10)


def _steering_excess(c) -> float:
    sq = sorted((x * x for x in c), reverse=True)
    return sq[0] + sq[1] - 1.0


def _chsh_excess(c) -> float:
    return (max_chsh_value(np.diag(c)) / 2.0) ** 2 - 1.0


def _restricted_bound(bd: BellDiagonalState, excess, cfg: OptimizerConfig) -> float:
    """Min of ``KL(lambda || lambda')`` over Bell-diagonal ``lambda'`` whose
    correlations satisfy ``excess(c') <= 0``.

    ``lambda'`` is parameterized by squares, ``lambda'_i = x_i^2 / |x|^2``.
    The constraint is an exterior quadratic penalty whose weight escalates
    in stages: every restart is screened at the low weights, the best one
    is carried through the high weights. The result is finally pulled back
    radially (``c' -> c' / sqrt(1 + excess)``) so the reported value always
    belongs to a feasible state.
    """
    if excess(bd.c) <= CRITERION_TOL:
        return 0.0
    lam = bd.lambdas
    log2 = math.log2
    terms = [(i, p, p * log2(p)) for i, p in enumerate(lam) if p > 0.0]

    def penalized(mu):
        def obj(v):
            sq = [t * t for t in v]
            norm = sq[0] + sq[1] + sq[2] + sq[3]
            lp = [t / norm for t in sq]
            kl = 0.0
            for i, p, plogp in terms:
                if lp[i] <= 0.0:
                    return math.inf
                kl += plogp - p * log2(lp[i])
            viol = excess(correlations_from_lambdas(lp))
            return kl + mu * viol * viol if viol > 0.0 else kl

        return obj

    def staged(x, weights, tol):
        res = None
        for mu in weights:
            res = nelder_mead_run(penalized(mu), x, step=0.1,
                                  max_iterations=cfg.max_iterations, tolerance=tol)
            x = res.x
        return res

    rng = cfg.rng()
    screen_tol = max(cfg.screen_tolerance, cfg.tolerance)
    starts = [np.sqrt(0.5 * rng.dirichlet(np.ones(4)) + 0.5 * np.asarray(lam))
              for _ in range(cfg.restarts)]
    best = best_of((staged(x0, _SCREEN_PENALTIES, screen_tol) for x0 in starts),
                   cfg.max_iterations)
    final = staged(best.x, _POLISH_PENALTIES, cfg.tolerance)
    if not final.converged:
        raise OptimizerFailure(f"penalty polish did not converge within {cfg.max_iterations} iterations")
    sq = final.x**2
    c = np.asarray(correlations_from_lambdas(sq / sq.sum()))
    over = excess(c)
    if over > 0.0:
        c = c / math.sqrt(1.0 + over)
    feasible = BellDiagonalState(tuple(c))
    if excess(feasible.c) > CRITERION_TOL:
        raise OptimizerFailure("pulled-back state still violates the constraint")
    lp = np.asarray(feasible.lambdas)
    return kl_spectrum(lam, lp / lp.sum()).value


def steering_bound_bd(bd: BellDiagonalState, cfg: OptimizerConfig) -> float:
    """Upper bound on the relative entropy of steering of ``bd``.

    Minimizes over Bell-diagonal states that are not steerable with two
    projective measurements; returns exactly 0 when ``bd`` is one of them.
    """
    return _restricted_bound(bd, _steering_excess, cfg)


def nonlocality_bound_bd(bd: BellDiagonalState, cfg: OptimizerConfig) -> float:
    """Upper bound on the relative entropy of nonlocality of ``bd``, over
    Bell-diagonal states that do not violate CHSH."""
    return _restricted_bound(bd, _chsh_excess, cfg)


# --------------------------------------------------------------- general states


def measure_report_general(rho: DensityMatrix, cfg: OptimizerConfig, ansatz_K: int = 16) -> MeasureReport:
    """Report for a state outside the Bell-diagonal family.

    Discord and entanglement come from the variational searches (the latter
    is an upper bound); the two-measurement steering criterion is not
    applicable and is left as ``None``.
    """
    t = correlation_matrix(rho)
    m = np.linalg.eigvalsh(t @ t.T)
    return MeasureReport(
        discord=discord_variational(rho, cfg),
        entanglement=ree_upper_bound(rho, ansatz_K, cfg),
        coherence=max(von_neumann_entropy(dephase(rho)) - von_neumann_entropy(rho), 0.0),
        steerable_2pm=None,
        chsh_violating=max_chsh_value(t) > 2.0 + CRITERION_TOL,
        chsh_parameter=float(m[-1] + m[-2]),
    )
