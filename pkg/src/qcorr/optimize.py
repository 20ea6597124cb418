"""Derivative-free local search with seeded multi-start.

The Nelder-Mead core is the textbook variant (reflection 1, expansion 2,
contraction 1/2, shrink 1/2). A run has converged once the spread of
function values over the simplex is at most ``tolerance`` and every vertex
lies within ``sqrt(tolerance)`` of the best one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple

import numpy as np

from .errors import OptimizerFailure


@dataclass(frozen=True)
class OptimizerConfig:
    seed: int
    restarts: int = 32
    max_iterations: int = 2000
    tolerance: float = 1e-10
    # loose tolerance for screening restarts before the winner is polished
    screen_tolerance: float = 1e-7

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0 or not self.screen_tolerance > 0:
            raise ValueError("tolerances must be > 0")

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)


class RunResult(NamedTuple):
    x: np.ndarray
    fun: float
    converged: bool
    iterations: int


def _initial_simplex(x0: np.ndarray, step: float, rng: np.random.Generator | None) -> np.ndarray:
    n = x0.size
    if rng is None:
        dirs = np.eye(n)
    else:
        # random orthonormal frame
        dirs, _ = np.linalg.qr(rng.standard_normal((n, n)))
        dirs = dirs.T
    return np.vstack([x0, x0 + step * dirs])


def nelder_mead_run(
    objective: Callable[[np.ndarray], float],
    x0,
    *,
    step: float = 0.5,
    max_iterations: int = 2000,
    tolerance: float = 1e-10,
    rng: np.random.Generator | None = None,
) -> RunResult:
    """One Nelder-Mead descent from ``x0``."""
    x0 = np.asarray(x0, dtype=float).ravel()
    sim = _initial_simplex(x0, step, rng)
    fs = np.array([objective(v) for v in sim], dtype=float)
    if not math.isfinite(fs[0]):
        raise ValueError("objective is not finite at the initial point")
    xtol = math.sqrt(tolerance)
    n = x0.size
    converged = False
    it = 0
    while it < max_iterations:
        order = np.argsort(fs, kind="stable")
        sim, fs = sim[order], fs[order]
        if fs[-1] - fs[0] <= tolerance and np.max(np.abs(sim[1:] - sim[0])) <= xtol:
            converged = True
            break
        it += 1
        centroid = sim[:-1].sum(axis=0) / n
        worst = sim[-1]
        xr = centroid + (centroid - worst)
        fr = objective(xr)
        if fr < fs[0]:
            xe = centroid + 2.0 * (centroid - worst)
            fe = objective(xe)
            if fe < fr:
                sim[-1], fs[-1] = xe, fe
            else:
                sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-2]:
            sim[-1], fs[-1] = xr, fr
            continue
        if fr < fs[-1]:
            xc = centroid + 0.5 * (xr - centroid)
            fc = objective(xc)
            if fc <= fr:
                sim[-1], fs[-1] = xc, fc
                continue
        else:
            xc = centroid + 0.5 * (worst - centroid)
            fc = objective(xc)
            if fc < fs[-1]:
                sim[-1], fs[-1] = xc, fc
                continue
        sim[1:] = sim[0] + 0.5 * (sim[1:] - sim[0])
        fs[1:] = [objective(v) for v in sim[1:]]
    best = int(np.argmin(fs))
    return RunResult(sim[best].copy(), float(fs[best]), converged, it)


def nelder_mead(objective, initial_point, cfg: OptimizerConfig, step: float = 0.5):
    """Nelder-Mead with ``cfg.restarts`` runs, each restarting at the
    incumbent with a freshly oriented simplex drawn from ``cfg.seed``.

    Returns ``(point, value)``. The first run uses an axis-aligned simplex.

    Raises
    ------
    OptimizerFailure
        If no run met the tolerance within ``cfg.max_iterations``.
    """
    rng = cfg.rng()
    res = nelder_mead_run(
        objective, initial_point, step=step,
        max_iterations=cfg.max_iterations, tolerance=cfg.tolerance,
    )
    best, any_converged = res, res.converged
    for _ in range(cfg.restarts - 1):
        res = nelder_mead_run(
            objective, best.x, step=step * rng.uniform(0.1, 1.0), rng=rng,
            max_iterations=cfg.max_iterations, tolerance=cfg.tolerance,
        )
        any_converged |= res.converged
        if res.fun < best.fun:
            best = res
    if not any_converged:
        raise OptimizerFailure(f"no run converged within {cfg.max_iterations} iterations")
    return best.x, best.fun


def best_of(results: Iterable[RunResult], max_iterations: int) -> RunResult:
    """Deterministic min-reduce in start order; earlier starts win ties."""
    best = None
    any_converged = False
    for res in results:
        any_converged |= res.converged
        if best is None or res.fun < best.fun:
            best = res
    if best is None or not any_converged:
        raise OptimizerFailure(f"no start converged within {max_iterations} iterations")
    return best


def multistart(objective, starts, cfg: OptimizerConfig, step: float = 0.5) -> RunResult:
    """Independent Nelder-Mead runs from each start; best one wins."""
    return best_of(
        (
            nelder_mead_run(objective, x0, step=step,
                            max_iterations=cfg.max_iterations, tolerance=cfg.tolerance)
            for x0 in starts
        ),
        cfg.max_iterations,
    )
