"""Closed-form quantifiers on Bell-diagonal states and Schmidt-form pure states.

All quantities are in bits. The steering and CHSH criteria are coded along
two separate paths (sorted squares vs. eigenvalues of ``T T^t``) so that one
can serve as a check on the other.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import NotEntangled
from .linalg import binary_entropy, shannon_entropy
from .states import BellDiagonalState, PureSchmidtState

# lambda_1 + lambda_2 must exceed 1 by more than this to count as steerable;
# keeps c1 = c2 = sqrt(2)/2 on the unsteerable side despite round-off
CRITERION_TOL = 1e-12


@dataclass
class MeasureReport:
    """All quantifiers and criteria for one state.

    ``steering_bound`` and ``nonlocality_bound`` are ``None`` when they were
    not requested or cannot be computed for the given input;
    ``steerable_2pm`` is ``None`` for states outside the Bell-diagonal family,
    where the two-measurement criterion does not apply.
    """

    discord: float
    entanglement: float
    coherence: float
    steerable_2pm: bool | None
    chsh_violating: bool
    chsh_parameter: float
    steering_bound: float | None = None
    nonlocality_bound: float | None = None

    def hierarchy_checks(self, tol: float = 1e-9) -> dict[str, bool]:
        checks = {
            "D >= E": self.discord >= self.entanglement - tol,
            "Coh >= D": self.coherence >= self.discord - tol,
        }
        if self.steering_bound is not None:
            checks["E >= S_bound"] = self.entanglement >= self.steering_bound - 1e-6
        if self.nonlocality_bound is not None and self.steering_bound is not None:
            checks["S_bound >= N_bound"] = self.steering_bound >= self.nonlocality_bound - 1e-6
        return checks

    def to_dict(self) -> dict:
        return asdict(self)


def classical_correlation_term(c: float) -> float:
    """``(1+c)/2 log2(1+c) + (1-c)/2 log2(1-c)``, zero-safe at ``|c| = 1``."""
    out = 0.0
    for x in (1.0 + c, 1.0 - c):
        if x > 0:
            out += 0.5 * x * math.log2(x)
    return out


def discord_bd(bd: BellDiagonalState) -> float:
    c = max(abs(x) for x in bd.c)
    d = 2.0 - shannon_entropy(bd.lambdas) - classical_correlation_term(c)
    return max(d, 0.0)


def entanglement_bd(bd: BellDiagonalState) -> float:
    """Relative entropy of entanglement, ``1 - H2(lambda_max)`` above one half."""
    lmax = bd.lambda_max
    if lmax <= 0.5:
        return 0.0
    return max(1.0 - binary_entropy(lmax), 0.0)


def dephased_spectrum(bd: BellDiagonalState) -> tuple[float, float, float, float]:
    """Spectrum of the computational-basis diagonal part, ``(I + c3 Z x Z)/4``."""
    up, down = 0.25 * (1.0 + bd.c[2]), 0.25 * (1.0 - bd.c[2])
    return (up, up, down, down)


def coherence_bd(bd: BellDiagonalState) -> float:
    return max(shannon_entropy(dephased_spectrum(bd)) - shannon_entropy(bd.lambdas), 0.0)


def coherence_minus_discord_bd(bd: BellDiagonalState) -> float:
    c = max(abs(x) for x in bd.c)
    return classical_correlation_term(c) - classical_correlation_term(bd.c[2])


def steerable_two_pm(bd: BellDiagonalState) -> tuple[bool, float]:
    """Steerability by two projective measurements.

    Returns ``(lambda_1 + lambda_2 > 1, lambda_1 + lambda_2)`` with the
    lambdas the two largest eigenvalues of ``T T^t``, here the two largest
    squared correlations.
    """
    squares = sorted((x * x for x in bd.c), reverse=True)
    total = squares[0] + squares[1]
    return total > 1.0 + CRITERION_TOL, total


def max_chsh_value(t: np.ndarray) -> float:
    """Largest CHSH expectation ``2 sqrt(m1 + m2)`` for correlation matrix ``t``."""
    ev = np.linalg.eigvalsh(t @ t.T)
    return 2.0 * math.sqrt(max(ev[-1] + ev[-2], 0.0))


def chsh_violating(bd: BellDiagonalState) -> tuple[bool, float]:
    """``(violates CHSH, maximal CHSH value)``."""
    value = max_chsh_value(bd.correlation_matrix)
    return value > 2.0 + CRITERION_TOL, value


def nearest_separable_bd(bd: BellDiagonalState) -> BellDiagonalState:
    """Closest separable Bell-diagonal state in relative entropy.

    The dominant weight is pulled down to 1/2 and the other three are
    rescaled to share the remaining half. For a pure Bell state the
    remaining half is split evenly.
    """
    lam = list(bd.lambdas)
    k = max(range(4), key=lam.__getitem__)
    if lam[k] <= 0.5:
        raise NotEntangled(f"lambda_max = {lam[k]} <= 1/2, state is separable")
    rest = sum(x for i, x in enumerate(lam) if i != k)
    out = [0.5 * x / rest if rest > 1e-15 else 0.5 / 3.0 for x in lam]
    out[k] = 0.5
    return BellDiagonalState.from_lambdas(out)


def pure_state_measures(ps: PureSchmidtState) -> MeasureReport:
    a2 = ps.alpha**2
    h = binary_entropy(a2)
    entangled = 0.0 < ps.alpha < 1.0
    # T = diag(2ab, -2ab, 1)
    chsh_param = 1.0 + 4.0 * a2 * (1.0 - a2)
    return MeasureReport(
        discord=h,
        entanglement=h,
        coherence=h,
        steerable_2pm=entangled,
        chsh_violating=entangled,
        chsh_parameter=chsh_param,
        steering_bound=None if entangled else 0.0,
        nonlocality_bound=None if entangled else 0.0,
    )


def measure_report(bd: BellDiagonalState, cfg=None) -> MeasureReport:
    """Closed-form report; steering/nonlocality bounds are filled in only
    when an optimizer config is supplied."""
    steerable, param = steerable_two_pm(bd)
    violating, _ = chsh_violating(bd)
    report = MeasureReport(
        discord=discord_bd(bd),
        entanglement=entanglement_bd(bd),
        coherence=coherence_bd(bd),
        steerable_2pm=steerable,
        chsh_violating=violating,
        chsh_parameter=param,
    )
    if cfg is not None:
        from .variational import nonlocality_bound_bd, steering_bound_bd

        report.steering_bound = steering_bound_bd(bd, cfg)
        report.nonlocality_bound = nonlocality_bound_bd(bd, cfg)
    return report
