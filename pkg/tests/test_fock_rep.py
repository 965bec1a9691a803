import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from alienquanta.errors import ConvergenceError, DimensionError, InvariantError
from alienquanta.fock_rep import (
    FockTruncation,
    Gamma,
    alien_annihilator,
    alien_number_operator,
    alien_vacuum_action_check,
    annihilator,
    creator,
    dGamma,
    field_operator,
    mode_distribution,
    number_commutator_check,
    number_operator,
    total_number,
    weyl_operator,
)
from alienquanta.gaussian import FockVacuumState, alien_number_variance, mean_alien_number, two_point
from alienquanta.phase_space import mu_normalize

from helpers import osc_J, random_J, squeezed_distribution

seeds = st.integers(0, 2**32 - 1)


def test_annihilator_on_one_quantum():
    J = osc_J(1.0, 1.0)
    T = FockTruncation(J, 4)
    a = annihilator(T, T.mode_basis[0]).mat
    assert np.vdot(T.ket((0, 0)), a @ T.ket((1, 0))) == pytest.approx(1.0)
    assert np.allclose(a @ T.vacuum, 0)


def test_annihilator_antilinear():
    J = osc_J(1.0)
    T = FockTruncation(J, 6)
    f = np.array([0.3, 0.5])
    # a(Jf) = -i a(f)
    assert np.allclose(annihilator(T, J.op @ f).mat, -1j * annihilator(T, f).mat)
    assert np.allclose(creator(T, J.op @ f).mat, 1j * creator(T, f).mat)


def test_total_number_on_two_one():
    T = FockTruncation(osc_J(1.0, 2.0), 3)
    N = total_number(T).mat
    assert np.vdot(T.ket((2, 1)), N @ T.ket((2, 1))) == 3


def test_index_round_trip():
    T = FockTruncation(osc_J(1.0, 2.0, 3.0), 3)
    for i in range(T.size):
        assert T.index(T.occupation(i)) == i


def test_mode_basis_must_be_orthonormal():
    J = osc_J(1.0, 1.0)
    with pytest.raises(InvariantError):
        FockTruncation(J, 3, mode_basis=[[1, 0, 0, 0], [1, 0, 0, 0]])
    with pytest.raises(DimensionError):
        FockTruncation(J, 3, mode_basis=[[1, 0, 0, 0]])


def test_size_caps():
    with pytest.raises(ValueError):
        FockTruncation(osc_J(*[1.0] * 13), 1)
    with pytest.raises(ValueError):
        FockTruncation(osc_J(1.0, 1.0, 1.0), 200)


def test_vacuum_weyl_expectation_example():
    T = FockTruncation(osc_J(1.0), 40)
    w = weyl_operator(T, [1.0, 0.0]).mat
    assert np.vdot(T.vacuum, w @ T.vacuum).real == pytest.approx(math.exp(-0.25), abs=1e-8)


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(1, 2))
def test_ccr_on_sector(seed, n):
    rng = np.random.default_rng(seed)
    J = random_J(rng, n)
    T = FockTruncation(J, 20 if n == 1 else 10)
    f, g = rng.normal(size=(2, 2 * n))
    f /= max(1.0, np.linalg.norm(f))
    g /= max(1.0, np.linalg.norm(g))
    pf, pg = field_operator(T, f).mat, field_operator(T, g).mat
    comm = pf @ pg - pg @ pf - 1j * J.space.sigma(f, g) * np.eye(T.size)
    cols = T.sector(2)
    assert np.abs(comm[np.ix_(cols, cols)]).max() <= 1e-8


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_weyl_relation_low_sector(seed):
    # the product is exact only well inside the truncation, so check states up to cutoff/4
    rng = np.random.default_rng(seed)
    J = random_J(rng, 1)
    T = FockTruncation(J, 40)
    f, g = rng.normal(size=(2, 2))
    f /= max(1.0, np.linalg.norm(f))
    g /= max(1.0, np.linalg.norm(g))
    lhs = weyl_operator(T, f).mat @ weyl_operator(T, g).mat
    rhs = np.exp(-0.5j * J.space.sigma(f, g)) * weyl_operator(T, f + g).mat
    cols = T.sector(3 * T.cutoff // 4)
    assert np.abs((lhs - rhs)[:, cols]).max() <= 1e-8


@settings(max_examples=10, deadline=None)
@given(seeds)
def test_unitaries_on_sector(seed):
    rng = np.random.default_rng(seed)
    J = random_J(rng, 2)
    T = FockTruncation(J, 8)
    W = weyl_operator(T, rng.normal(size=4)).mat
    assert np.abs(W.conj().T @ W - np.eye(T.size)).max() <= 1e-8
    Z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    U, _ = np.linalg.qr(Z)
    G = Gamma(T, U).mat
    cols = T.sector(2)
    GG = G[:, cols].conj().T @ G[:, cols]
    assert np.abs(GG - np.eye(cols.size)).max() <= 1e-8


def test_gamma_of_phase_is_exp_dgamma():
    T = FockTruncation(osc_J(1.0, 2.0), 6)
    H = np.array([[0.3, 0.1 - 0.2j], [0.1 + 0.2j, -0.4]])
    lam, V = np.linalg.eigh(H)
    U = (V * np.exp(1j * lam)) @ V.conj().T
    dG = dGamma(T, H).mat
    lamF, VF = np.linalg.eigh(dG)
    expected = (VF * np.exp(1j * lamF)) @ VF.conj().T
    cols = T.sector(0)
    assert np.abs((Gamma(T, U).mat - expected)[np.ix_(cols, cols)]).max() <= 1e-10


def test_dgamma_identity_is_number():
    T = FockTruncation(osc_J(1.0, 2.0), 4)
    assert np.allclose(dGamma(T, np.eye(2)).mat, total_number(T).mat)
    with pytest.raises(InvariantError):
        dGamma(T, [[0, 1], [0, 0]])
    with pytest.raises(InvariantError):
        Gamma(T, 2 * np.eye(2))


def test_number_operator_of_mode():
    T = FockTruncation(osc_J(1.0, 1.0), 4)
    N0 = number_operator(T, T.mode_basis[0]).mat
    assert np.vdot(T.ket((3, 1)), N0 @ T.ket((3, 1))).real == pytest.approx(3.0)


def test_alien_annihilator_kills_alien_vacuum():
    # a_2(f) on the J2 vacuum, represented over J1
    J1, J2 = osc_J(1.0), osc_J(2.0)
    T = FockTruncation(J1, 60)
    a2 = alien_annihilator(T, J2, [1.0, 0.0]).mat
    _, s, vh = np.linalg.svd(a2)
    vac2 = vh[-1].conj()
    assert s[-1] < 1e-10
    # overlap with the J1 vacuum is the P(0) of the reverse pair
    assert abs(np.vdot(T.vacuum, vac2)) ** 2 == pytest.approx(2 * math.sqrt(2) / 3, abs=1e-10)


@settings(max_examples=15, deadline=None)
@given(seeds, st.integers(1, 2))
def test_closed_forms_match_matrix_oracle(seed, n):
    rng = np.random.default_rng(seed)
    J1, J2 = random_J(rng, n, spread=0.8), random_J(rng, n, spread=0.8)
    T = FockTruncation(J1, 30 if n == 1 else 12)
    f = mu_normalize(J2, rng.normal(size=2 * n))
    N = alien_number_operator(T, J2, f).mat
    v = N @ T.vacuum
    mean = np.vdot(T.vacuum, v).real
    var = np.vdot(v, v).real - mean**2
    w = FockVacuumState(J1)
    assert mean == pytest.approx(mean_alien_number(w, J2, f), abs=1e-6)
    assert var == pytest.approx(alien_number_variance(w, J2, f), abs=1e-6)
    g = rng.normal(size=2 * n)
    two = np.vdot(T.vacuum, field_operator(T, f).mat @ field_operator(T, g).mat @ T.vacuum)
    assert two == pytest.approx(two_point(w, f, g), abs=1e-6)


def test_commutator_same_ray_zero():
    J = osc_J(1.0, 2.0)
    T = FockTruncation(J, 8)
    f = np.array([1.0, 0.3, 0.0, 0.0])
    r = number_commutator_check(T, J, J, f, f)
    assert r["residual"] <= 1e-10 and r["commutator_norm"] <= 1e-10
    r = number_commutator_check(T, J, J, f, J.op @ f)
    assert r["commutator_norm"] <= 1e-10


def test_commutator_incompatible_rays():
    J = osc_J(1.0, 2.0)
    T = FockTruncation(J, 8)
    f = np.array([1.0, 0.0, 0.0, 0.0])
    g = np.array([1.0, 0.0, 1.0, 0.0])
    r = number_commutator_check(T, J, J, f, g)
    assert r["residual"] <= 1e-6 and r["commutator_norm"] > 0.1


def test_commutator_alien_single_mode():
    J1, J2 = osc_J(1.0), osc_J(2.0)
    T = FockTruncation(J1, 30)
    r = number_commutator_check(T, J1, J2, [1.0, 0.0], [0.0, 1.0])
    assert r["residual"] <= 1e-6 and r["commutator_norm"] > 0.1


def test_commutator_requires_matching_truncation():
    T = FockTruncation(osc_J(1.0), 4)
    with pytest.raises(DimensionError):
        number_commutator_check(T, osc_J(2.0), osc_J(2.0), [1, 0], [1, 0])


def test_alien_vacuum_action():
    J1, J2 = osc_J(1.0), osc_J(2.0)
    T = FockTruncation(J1, 10)
    norm, pred = alien_vacuum_action_check(T, J1, J1, [1.0, 0.0])
    assert norm <= 1e-12 and pred <= 1e-12
    norm, pred = alien_vacuum_action_check(T, J1, J2, [1.0, 0.0])
    assert norm > 0.1 and norm == pytest.approx(pred, rel=1e-10)


@settings(max_examples=20, deadline=None)
@given(seeds)
def test_alien_vacuum_action_coefficient(seed):
    rng = np.random.default_rng(seed)
    J1, J2 = random_J(rng, 2), random_J(rng, 2)
    T = FockTruncation(J1, 4)
    norm, pred = alien_vacuum_action_check(T, J1, J2, rng.normal(size=4))
    assert norm == pytest.approx(pred, rel=1e-8, abs=1e-12)


def test_mode_distribution_squeezed():
    for r in (0.3, 1.0, 1.5):
        g = np.diag([math.exp(2 * r), math.exp(-2 * r)])
        ps, pj, _ = mode_distribution(g, 10)
        exact = squeezed_distribution(math.sinh(r) ** 2, 10)
        assert np.abs(ps - exact).max() <= 1e-8
        assert np.abs(pj - exact).max() <= 1e-8


def test_mode_distribution_gives_up():
    g = np.diag([math.exp(6.0), math.exp(-6.0)])
    with pytest.raises(ConvergenceError):
        mode_distribution(g, 10)


@settings(max_examples=10, deadline=None)
@given(seeds, st.integers(1, 3))
def test_weyl_factorized_equals_dense_exponential(seed, n):
    from alienquanta.fock_rep import _expi_hermitian

    rng = np.random.default_rng(seed)
    J = random_J(rng, n)
    T = FockTruncation(J, 12 if n < 3 else 5)
    f = rng.normal(size=2 * n)
    dense = _expi_hermitian(field_operator(T, f).mat)
    assert np.abs(weyl_operator(T, f).mat - dense).max() <= 1e-12
