import itertools
import math

import numpy as np
import pytest

from qcorr import closed_form as cf
from qcorr.errors import InvalidState, NotEntangled
from qcorr.divergences import kl_spectrum
from qcorr.linalg import binary_entropy
from qcorr.states import (
    BellDiagonalState,
    PureSchmidtState,
    bell_diagonal_from_c,
    dephase,
    sample_bell_diagonal,
)

R2 = math.sqrt(2) / 2

X = np.array([[0, 1], [1, 0]])
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1, -1])


def h_bits(p):
    return -sum(x * math.log2(x) for x in p if x > 0)


def dense_rho(c):
    return (np.eye(4) + c[0] * np.kron(X, X) + c[1] * np.kron(Y, Y) + c[2] * np.kron(Z, Z)) / 4


def dense_entropy(m):
    return h_bits(np.clip(np.linalg.eigvalsh(m), 0, None))


def dense_coherence(c):
    """Oracle: dephase the full matrix in the computational basis."""
    m = dense_rho(c)
    return dense_entropy(np.diag(np.diag(m))) - dense_entropy(m)


def axis_discord(c):
    """Oracle: best of the nine axis-aligned local product bases."""
    m = dense_rho(c)
    best = math.inf
    for ka, kb in itertools.product((X, Y, Z), repeat=2):
        pa = [(np.eye(2) + s * ka) / 2 for s in (1, -1)]
        pb = [(np.eye(2) + s * kb) / 2 for s in (1, -1)]
        probs = [np.trace(m @ np.kron(a, b)).real for a in pa for b in pb]
        best = min(best, h_bits(probs))
    return best - dense_entropy(m)


def tetra_lattice(n=41):
    axis = np.linspace(-1, 1, n)
    for c in itertools.product(axis, repeat=3):
        try:
            yield BellDiagonalState(c)
        except InvalidState:
            continue


# ------------------------------------------------------------------ discord


def test_discord_examples():
    assert cf.discord_bd(bell_diagonal_from_c(0, 0, 0)) == pytest.approx(0.0, abs=1e-12)
    assert cf.discord_bd(bell_diagonal_from_c(0.5, 0, 0)) == pytest.approx(0.0, abs=1e-12)
    # pure-state value -a^2 log a^2 - b^2 log b^2 at a = b = 1/sqrt 2
    assert cf.discord_bd(bell_diagonal_from_c(1, -1, 1)) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("c", [(0.3, -0.2, 0.4), (-0.8, -0.8, -0.8), (0.6, 0, 0.3), (0.1, 0.5, -0.35)])
def test_discord_matches_dense_oracle(c):
    assert cf.discord_bd(BellDiagonalState(c)) == pytest.approx(axis_discord(c), abs=1e-12)


def test_discord_single_correlation_is_zero():
    for k in range(3):
        for v in np.linspace(-1, 1, 21):
            c = [0.0, 0.0, 0.0]
            c[k] = v
            assert cf.discord_bd(BellDiagonalState(tuple(c))) == pytest.approx(0.0, abs=1e-10)


# ------------------------------------------------------------- entanglement


def test_entanglement_examples():
    assert cf.entanglement_bd(bell_diagonal_from_c(0, 0, 0)) == 0.0
    assert cf.entanglement_bd(bell_diagonal_from_c(1, -1, 1)) == pytest.approx(1.0)
    bd = bell_diagonal_from_c(-0.8, -0.8, -0.8)
    assert cf.entanglement_bd(bd) == pytest.approx(1 - h_bits([0.85, 0.15]), abs=1e-14)


def test_entanglement_sqrt2_example_is_unphysical():
    # the c1 = c2 = sqrt(2)/2, c3 = 0 example lies outside the tetrahedron
    with pytest.raises(InvalidState):
        bell_diagonal_from_c(R2, R2, 0.0)
    # its would-be value, from the binary-entropy scalar alone
    lmax = (1 + math.sqrt(2)) / 4
    assert 1 - binary_entropy(lmax) == pytest.approx(0.0311659942898457, abs=1e-15)


def test_entanglement_continuous_at_half():
    bd = BellDiagonalState.from_lambdas([0.5 + 1e-9, 0.5 - 1e-9, 0, 0])
    assert 0 <= cf.entanglement_bd(bd) < 1e-12


def test_entanglement_range():
    rng = np.random.default_rng(2)
    for _ in range(5000):
        bd = sample_bell_diagonal(rng)
        e = cf.entanglement_bd(bd)
        assert 0 <= e <= 1
        assert (e == 0) == (bd.lambda_max <= 0.5)


# ---------------------------------------------------------------- coherence


def test_coherence_examples():
    assert cf.coherence_bd(bell_diagonal_from_c(0, 0, 0.5)) == pytest.approx(0.0, abs=1e-12)
    assert cf.coherence_bd(bell_diagonal_from_c(1, -1, 1)) == pytest.approx(1.0, abs=1e-12)
    # (0.5, 0.5, 0.5) is outside the tetrahedron; (0.5, -0.5, 0.5) is its valid neighbour
    with pytest.raises(InvalidState):
        bell_diagonal_from_c(0.5, 0.5, 0.5)
    c = (0.5, -0.5, 0.5)
    value = cf.coherence_bd(BellDiagonalState(c))
    assert value == pytest.approx(dense_coherence(c), abs=1e-12)
    assert value >= 0


def test_coherence_matches_dephasing_route():
    rng = np.random.default_rng(6)
    from qcorr.linalg import von_neumann_entropy

    for _ in range(300):
        bd = sample_bell_diagonal(rng)
        rho = bd.density_matrix()
        direct = von_neumann_entropy(dephase(rho)) - von_neumann_entropy(rho)
        assert cf.coherence_bd(bd) == pytest.approx(direct, abs=1e-10)


def test_coherence_minus_discord_examples():
    assert cf.coherence_minus_discord_bd(bell_diagonal_from_c(0.2, -0.1, 0.6)) == pytest.approx(0.0, abs=1e-15)
    assert cf.coherence_minus_discord_bd(bell_diagonal_from_c(1, -1, 1)) == 0.0
    with pytest.raises(InvalidState):
        bell_diagonal_from_c(0.9, 0, 0.5)
    # valid stand-in, value from the dense-matrix oracles
    c = (0.6, 0, 0.3)
    expected = dense_coherence(c) - axis_discord(c)
    assert expected == pytest.approx(0.21213996048812866, abs=1e-12)
    assert cf.coherence_minus_discord_bd(BellDiagonalState(c)) == pytest.approx(expected, abs=1e-10)


# ---------------------------------------------------------------- criteria


def test_steering_examples():
    assert cf.steerable_two_pm(bell_diagonal_from_c(1, -1, 1)) == (True, 2.0)
    flag, total = cf.steerable_two_pm(bell_diagonal_from_c(-0.8, -0.8, -0.8))
    assert flag and total == pytest.approx(1.28)


def test_steering_boundary_is_unsteerable():
    # c1 = c2 = sqrt(2)/2 is only physical for c3 <= 1 - sqrt 2; there
    # lambda_1 + lambda_2 = 1 exactly, the unsteerable side
    bd = bell_diagonal_from_c(R2, R2, -0.5)
    flag, total = cf.steerable_two_pm(bd)
    assert not flag and total == pytest.approx(1.0)
    assert not cf.chsh_violating(bd)[0]


def test_chsh_examples():
    assert cf.chsh_violating(bell_diagonal_from_c(0, 0, 0)) == (False, 0.0)
    flag, value = cf.chsh_violating(bell_diagonal_from_c(1, -1, 1))
    assert flag and value == pytest.approx(2 * math.sqrt(2))
    flag, value = cf.chsh_violating(bell_diagonal_from_c(-0.8, -0.8, -0.8))
    assert flag and value == pytest.approx(2 * math.sqrt(1.28))
    assert value == pytest.approx(2.2627, abs=1e-4)


def test_criteria_agree():
    rng = np.random.default_rng(17)
    for _ in range(20_000):
        bd = sample_bell_diagonal(rng)
        assert cf.steerable_two_pm(bd)[0] == cf.chsh_violating(bd)[0]


# -------------------------------------------------------- nearest separable


def test_nearest_separable_examples():
    near = cf.nearest_separable_bd(BellDiagonalState.from_lambdas([0.85, 0.05, 0.05, 0.05]))
    np.testing.assert_allclose(near.lambdas, [0.5, 1 / 6, 1 / 6, 1 / 6], atol=1e-12)
    kl = kl_spectrum([0.85, 0.05, 0.05, 0.05], near.lambdas).value
    assert kl == pytest.approx(1 - h_bits([0.85, 0.15]), abs=1e-12)

    bd = BellDiagonalState.from_lambdas([0.6, 0.4, 0, 0])
    near = cf.nearest_separable_bd(bd)
    np.testing.assert_allclose(near.lambdas, [0.5, 0.5, 0, 0], atol=1e-12)
    expected = 0.6 * math.log2(1.2) + 0.4 * math.log2(0.8)
    assert expected == pytest.approx(0.0290, abs=1e-4)
    assert kl_spectrum(bd.lambdas, near.lambdas).value == pytest.approx(expected, abs=1e-12)
    assert cf.entanglement_bd(bd) == pytest.approx(expected, abs=1e-12)


def test_nearest_separable_pure_bell_limit():
    near = cf.nearest_separable_bd(bell_diagonal_from_c(1, -1, 1))
    np.testing.assert_allclose(near.lambdas, [0.5, 1 / 6, 1 / 6, 1 / 6], atol=1e-12)
    assert kl_spectrum((1, 0, 0, 0), near.lambdas).value == pytest.approx(1.0)


def test_nearest_separable_rejects_separable():
    with pytest.raises(NotEntangled):
        cf.nearest_separable_bd(bell_diagonal_from_c(0, 0, 0))


@pytest.mark.filterwarnings("ignore:Values in x were outside bounds")
def test_nearest_separable_against_numerical_projection():
    """Oracle: brute-force KL projection onto {lambda'_max <= 1/2} by scipy."""
    from scipy.optimize import minimize

    rng = np.random.default_rng(18)
    done = 0
    while done < 20:
        bd = sample_bell_diagonal(rng)
        if bd.lambda_max <= 0.5:
            continue
        done += 1
        lam = np.array(bd.lambdas)
        res = minimize(
            lambda q: float(np.sum(lam * np.log2(lam / q))),
            np.full(4, 0.25),
            method="SLSQP",
            bounds=[(1e-9, 0.5)] * 4,
            constraints=[{"type": "eq", "fun": lambda q: q.sum() - 1}],
            options={"ftol": 1e-14, "maxiter": 500},
        )
        near = cf.nearest_separable_bd(bd)
        assert kl_spectrum(lam, near.lambdas).value == pytest.approx(res.fun, abs=1e-7)
        assert kl_spectrum(lam, near.lambdas).value <= res.fun + 1e-12


def test_nearest_separable_invariants():
    rng = np.random.default_rng(19)
    done = 0
    while done < 1000:
        bd = sample_bell_diagonal(rng)
        if bd.lambda_max <= 0.5:
            continue
        done += 1
        near = cf.nearest_separable_bd(bd)
        assert near.lambda_max <= 0.5 + 1e-12
        assert kl_spectrum(bd.lambdas, near.lambdas).value == pytest.approx(cf.entanglement_bd(bd), abs=1e-8)


# -------------------------------------------------------------- pure states


def test_pure_state_measures():
    r = cf.pure_state_measures(PureSchmidtState(1.0))
    assert (r.discord, r.entanglement, r.coherence) == (0.0, 0.0, 0.0)
    assert not r.steerable_2pm and not r.chsh_violating
    assert r.steering_bound == 0.0 and r.nonlocality_bound == 0.0

    r = cf.pure_state_measures(PureSchmidtState(1 / math.sqrt(2)))
    assert r.discord == pytest.approx(1.0) and r.entanglement == pytest.approx(1.0)
    assert r.steerable_2pm and r.chsh_violating

    r = cf.pure_state_measures(PureSchmidtState(math.sqrt(0.3)))
    assert r.discord == pytest.approx(h_bits([0.3, 0.7]), abs=1e-12)
    assert r.discord == pytest.approx(0.8813, abs=1e-4)
    assert r.entanglement == r.discord


def test_pure_state_chsh_parameter_matches_dense():
    from qcorr.states import correlation_matrix

    for a in np.linspace(0, 1, 11):
        ps = PureSchmidtState(a)
        t = correlation_matrix(ps.density_matrix())
        m = np.sort(np.linalg.eigvalsh(t @ t.T))
        assert cf.pure_state_measures(ps).chsh_parameter == pytest.approx(m[-1] + m[-2], abs=1e-12)


# ------------------------------------------------------------------- report


def test_measure_report_examples():
    r = cf.measure_report(bell_diagonal_from_c(0, 0, 0))
    assert (r.discord, r.entanglement, r.coherence) == (0.0, 0.0, 0.0)
    assert not r.steerable_2pm and not r.chsh_violating

    r = cf.measure_report(bell_diagonal_from_c(R2, R2, -0.5))
    assert r.entanglement > 0 and not r.steerable_2pm

    with pytest.raises(InvalidState):
        bell_diagonal_from_c(R2, R2, 0.2)


def test_measure_report_with_bounds(cfg):
    r = cf.measure_report(bell_diagonal_from_c(-0.8, -0.8, -0.8), cfg)
    assert r.discord >= r.entanglement
    assert r.entanglement == pytest.approx(0.390, abs=5e-4)
    assert 0 < r.steering_bound <= r.entanglement
    assert r.nonlocality_bound == pytest.approx(r.steering_bound, abs=1e-6)
    assert r.steerable_2pm and r.chsh_violating
    assert all(r.hierarchy_checks().values())


def test_lattice_hierarchy():
    n = 0
    for bd in tetra_lattice(41):
        n += 1
        d, e, coh = cf.discord_bd(bd), cf.entanglement_bd(bd), cf.coherence_bd(bd)
        assert d >= e - 1e-9
        assert coh >= d - 1e-9
        assert cf.coherence_minus_discord_bd(bd) == pytest.approx(coh - d, abs=1e-10)
    assert n > 0.3 * 41**3  # tetrahedron is a third of the cube
