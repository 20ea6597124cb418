"""Grid sweeps, the lattice oracle for the restricted bounds, and the
property suites behind ``qcorr verify``."""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import closed_form as cf
from .divergences import kl_spectrum, relative_entropy
from .errors import InvalidState, UnknownSuite
from .linalg import binary_entropy
from .optimize import OptimizerConfig
from .states import (
    BellDiagonalState,
    PureSchmidtState,
    depolarize,
    mix,
    random_density_matrix,
    reattach_maximally_mixed,
    sample_bell_diagonal,
)
from .variational import (
    discord_variational,
    nonlocality_bound_bd,
    ree_upper_bound,
    steering_bound_bd,
)

# ------------------------------------------------------------------- sweeps

QUANTITIES = {
    "d_minus_e": lambda bd: cf.discord_bd(bd) - cf.entanglement_bd(bd),
    "e": cf.entanglement_bd,
    "c_minus_d": lambda bd: cf.coherence_bd(bd) - cf.discord_bd(bd),
    "d": cf.discord_bd,
    "coh": cf.coherence_bd,
    "chsh_param": lambda bd: cf.steerable_two_pm(bd)[1],
}


@dataclass(frozen=True)
class SweepSpec:
    quantity: str
    c3: float
    grid_n: int
    output_path: str | Path | None = None

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}; choose from {sorted(QUANTITIES)}")
        if self.grid_n < 2:
            raise ValueError("grid_n must be >= 2")
        if not -1.0 <= self.c3 <= 1.0:
            raise ValueError("c3 must lie in [-1, 1]")


def lattice(n: int) -> list[float]:
    return [-1.0 + 2.0 * i / (n - 1) for i in range(n)]


def sweep_rows(spec: SweepSpec):
    """Yield ``(c1, c2, value)`` in c1-major order; ``value`` is None where
    ``(c1, c2, c3)`` is not a state."""
    fn = QUANTITIES[spec.quantity]
    axis = lattice(spec.grid_n)
    for c1 in axis:
        for c2 in axis:
            try:
                bd = BellDiagonalState((c1, c2, spec.c3))
            except InvalidState:
                yield c1, c2, None
                continue
            yield c1, c2, fn(bd)


def sweep_csv(spec: SweepSpec) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["c1", "c2", "value"])
    for c1, c2, v in sweep_rows(spec):
        # repr is the shortest round-trip form
        w.writerow([repr(c1), repr(c2), "" if v is None else repr(float(v))])
    return buf.getvalue()


def run_sweep(spec: SweepSpec) -> str:
    """Write the sweep CSV to ``spec.output_path`` and return its text."""
    text = sweep_csv(spec)
    if spec.output_path is not None:
        Path(spec.output_path).write_text(text, encoding="utf-8")
    return text


# ---------------------------------------------------------- lattice oracle


def lattice_bound_oracle(bd: BellDiagonalState, n: int = 61, levels: int = 4) -> float:
    """Grid-search value of the restricted steering bound.

    Evaluates ``KL(lambda || lambda(c'))`` on an ``n^3`` lattice of feasible
    ``c'`` (inside the tetrahedron, two largest ``c'^2`` summing to at most
    one), then re-grids an ``n^3`` box of half-width four spacings around
    the incumbent, ``levels`` times in all. The feasible set is an
    intersection of cylinders and KL is convex in ``c'``, so zooming keeps
    the minimum in view.
    """
    lam = np.asarray(bd.lambdas)
    center = np.zeros(3)
    half = 1.0
    best = math.inf
    sign = np.array([[1, 1, 1], [1, -1, -1], [-1, -1, 1], [-1, 1, -1]], dtype=float)
    for _ in range(levels):
        axes = [np.linspace(max(-1.0, c - half), min(1.0, c + half), n) for c in center]
        g = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, 3)
        # lambda_ab rows in (00, 01, 10, 11) order; signs of (c1, c2, c3)
        lp = 0.25 * (1.0 + g @ sign.T)
        sq = np.sort(g * g, axis=1)
        ok = np.all(lp >= 0.0, axis=1) & (sq[:, 1] + sq[:, 2] <= 1.0)
        m = lam > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            kl = np.where(ok, (np.log2(lam[m]) - np.log2(lp[:, m])) @ lam[m], np.inf)
        k = int(np.argmin(kl))
        if kl[k] < best:
            best = float(kl[k])
            center = g[k]
        half = 4.0 * (2.0 * half / (n - 1))
    return best


# ------------------------------------------------------------------ suites


@dataclass
class CheckStat:
    tolerance: float
    samples: int = 0
    failures: int = 0
    worst: float = -math.inf

    def record(self, violation: float, fail: bool | None = None):
        self.samples += 1
        self.worst = max(self.worst, violation)
        if fail if fail is not None else violation > self.tolerance:
            self.failures += 1


@dataclass
class SuiteResult:
    suite_name: str
    samples: int
    checks: dict[str, CheckStat] = field(default_factory=dict)
    elapsed: float = 0.0

    @property
    def failures(self) -> int:
        return sum(c.failures for c in self.checks.values())

    @property
    def worst_violation(self) -> float:
        return max((c.worst for c in self.checks.values()), default=-math.inf)

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def check(self, name: str, tolerance: float) -> CheckStat:
        return self.checks.setdefault(name, CheckStat(tolerance))

    def summary(self) -> str:
        lines = [
            f"suite {self.suite_name}: samples={self.samples} failures={self.failures} "
            f"worst_violation={self.worst_violation:.3e} elapsed={self.elapsed:.2f}s "
            f"{'PASS' if self.passed else 'FAIL'}"
        ]
        for name, c in self.checks.items():
            lines.append(
                f"  {name}: n={c.samples} failures={c.failures} worst={c.worst:.3e} tol={c.tolerance:g}"
            )
        return "\n".join(lines)


def _sample_where(rng, predicate):
    while True:
        bd = sample_bell_diagonal(rng)
        if predicate(bd):
            return bd


def suite_hierarchy(samples: int, seed: int, oracle_samples: int = 50) -> SuiteResult:
    """D >= E >= 0 and Coh >= D on sampled states; bounds vanish off the
    steerable set and match the lattice oracle on it."""
    rng = np.random.default_rng(seed)
    cfg = OptimizerConfig(seed=seed)
    res = SuiteResult("hierarchy", samples)
    d_e, e_0, coh_d = res.check("D >= E", 1e-9), res.check("E >= 0", 1e-9), res.check("Coh >= D", 1e-9)
    zero = res.check("bounds zero when unsteerable", 0.0)
    for _ in range(samples):
        bd = sample_bell_diagonal(rng)
        d, e, coh = cf.discord_bd(bd), cf.entanglement_bd(bd), cf.coherence_bd(bd)
        d_e.record(e - d)
        e_0.record(-e)
        coh_d.record(d - coh)
        if not cf.steerable_two_pm(bd)[0]:
            zero.record(max(steering_bound_bd(bd, cfg), nonlocality_bound_bd(bd, cfg)))
    gap = res.check("bounds vs lattice oracle", 1e-3)
    below_e = res.check("bounds <= E", 1e-6)
    agree = res.check("steering == nonlocality bound", 1e-6)
    orng = np.random.default_rng([seed, 1])
    for _ in range(oracle_samples):
        bd = _sample_where(orng, lambda b: cf.steerable_two_pm(b)[0])
        s, n = steering_bound_bd(bd, cfg), nonlocality_bound_bd(bd, cfg)
        ref = lattice_bound_oracle(bd)
        gap.record(max(abs(s - ref), abs(n - ref)))
        below_e.record(max(s, n) - cf.entanglement_bd(bd))
        agree.record(abs(s - n))
    return res


def suite_criteria(samples: int, seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("criteria", samples)
    eq = res.check("steerable_2pm == chsh_violating", 0.0)
    for _ in range(samples):
        bd = sample_bell_diagonal(rng)
        s, m = cf.steerable_two_pm(bd)
        v, chsh = cf.chsh_violating(bd)
        eq.record(abs(m - (chsh / 2.0) ** 2), fail=(s != v))
    return res


def suite_convexity(samples: int, seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("convexity", samples)
    chk = res.check("joint convexity", 1e-9)
    for _ in range(samples):
        r1, r2, s1, s2 = (random_density_matrix(rng) for _ in range(4))
        x = rng.uniform()
        lhs = relative_entropy(mix(r1, r2, x), mix(s1, s2, x)).value
        rhs = x * relative_entropy(r1, s1).value + (1 - x) * relative_entropy(r2, s2).value
        chk.record(lhs - rhs)
    return res


def suite_monotonicity(samples: int, seed: int) -> SuiteResult:
    rng = np.random.default_rng(seed)
    res = SuiteResult("monotonicity", samples)
    chk = res.check("CPTP monotonicity", 1e-9)
    for i in range(samples):
        rho, sigma = random_density_matrix(rng), random_density_matrix(rng)
        kind = i % 3
        if kind == 0:
            p = rng.uniform()
            channel = lambda s, p=p: depolarize(s, p)
        else:
            keep = "A" if kind == 1 else "B"
            channel = lambda s, keep=keep: reattach_maximally_mixed(s, keep)
        before = relative_entropy(rho, sigma).value
        after = relative_entropy(channel(rho), channel(sigma)).value
        chk.record(after - before)
    return res


def suite_oracles(samples: int, seed: int, pure_samples: int | None = None) -> SuiteResult:
    """Variational discord against the closed forms (Bell-diagonal and pure)."""
    rng = np.random.default_rng(seed)
    cfg = OptimizerConfig(seed=seed)
    pure_samples = max(1, samples // 4) if pure_samples is None else pure_samples
    res = SuiteResult("oracles", samples + pure_samples)
    bd_chk = res.check("discord vs closed form", 1e-4)
    for _ in range(samples):
        bd = sample_bell_diagonal(rng)
        bd_chk.record(abs(discord_variational(bd.density_matrix(), cfg) - cf.discord_bd(bd)))
    pure_chk = res.check("pure-state discord vs H2(alpha^2)", 1e-4)
    for _ in range(pure_samples):
        ps = PureSchmidtState(math.sqrt(rng.uniform()))
        ref = binary_entropy(ps.alpha**2)
        pure_chk.record(abs(discord_variational(ps.density_matrix(), cfg) - ref))
    return res


def suite_ree(samples: int, seed: int, projection_samples: int | None = None) -> SuiteResult:
    """Separable-ansatz REE and the nearest-separable projection against the
    closed-form entanglement."""
    rng = np.random.default_rng(seed)
    cfg = OptimizerConfig(seed=seed)
    projection_samples = 10 * samples if projection_samples is None else projection_samples
    res = SuiteResult("ree", samples + projection_samples)
    entangled = lambda b: b.lambda_max > 0.5
    up = res.check("ree_upper_bound - E <= 1e-3", 1e-3)
    low = res.check("E - ree_upper_bound <= 1e-6", 1e-6)
    for _ in range(samples):
        bd = _sample_where(rng, entangled)
        gap = ree_upper_bound(bd.density_matrix(), 16, cfg) - cf.entanglement_bd(bd)
        up.record(gap)
        low.record(-gap)
    proj = res.check("nearest-separable KL vs E", 1e-8)
    for _ in range(projection_samples):
        bd = _sample_where(rng, entangled)
        near = cf.nearest_separable_bd(bd)
        proj.record(abs(kl_spectrum(bd.lambdas, near.lambdas).value - cf.entanglement_bd(bd)))
    return res


SUITES = {
    "hierarchy": suite_hierarchy,
    "convexity": suite_convexity,
    "monotonicity": suite_monotonicity,
    "criteria": suite_criteria,
    "oracles": suite_oracles,
    "ree": suite_ree,
}


def run_suite(name: str, samples: int, seed: int) -> SuiteResult:
    try:
        fn = SUITES[name]
    except KeyError:
        raise UnknownSuite(f"unknown suite {name!r}; choose from {sorted(SUITES)}") from None
    t0 = time.perf_counter()
    res = fn(samples, seed)
    res.elapsed = time.perf_counter() - t0
    return res
