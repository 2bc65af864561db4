import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from darboux_nvne.darboux import (
    DarbouxSolution,
    SingularDenominatorError,
    beta_of_lambda,
    build_lax,
    darboux_sandwich,
    dress,
    evolve_phi,
    evolve_psi,
    norm_factor,
    p_int,
    rho1_closed_form,
)
from darboux_nvne.matrix_core import unitary_exp
from darboux_nvne.nonlinearity import Nonlinearity
from darboux_nvne.seeds import build_equispaced_seed, build_inhomogeneous_seed
from darboux_nvne.verify import nvne_residual_fd

from .conftest import random_density


def _outer_projector(psi):
    return np.outer(psi, psi.conj()) / np.vdot(psi, psi).real


# ---- beta(lambda)

def test_beta_lambda3_equispaced(ho_seed):
    b = beta_of_lambda(ho_seed)
    assert b[2] == pytest.approx(-0.4j, abs=1e-15)


def test_beta_block_cancellation(ho_seed, ha_seed):
    for seed in (ho_seed, ha_seed, build_equispaced_seed(1.0, 0.1, 0.2, f=Nonlinearity.power(3))):
        b = beta_of_lambda(seed)
        assert abs(b[0] - b[1]) < 1e-14


# ---- psi(t), F(t), P_int

def test_psi_at_zero(ho_seed):
    lax = build_lax(ho_seed)
    np.testing.assert_allclose(evolve_psi(lax, 0.0), lax.phi0, atol=1e-15)


def test_psi_gamma1_zero_is_scaled_omega3(ho_seed):
    lax = build_lax(ho_seed, 0.0, 1.0)
    for t in (-2.0, 0.5, 3.0):
        expected = np.exp(-1j * lax.beta[2] * t / lax.mu) * ho_seed.omega[:, 2]
        np.testing.assert_allclose(evolve_psi(lax, t), expected, atol=1e-14)


def test_norm_matches_F(ho_seed):
    lax = build_lax(ho_seed)
    for t in (-5.0, 0.0, 5.0):
        psi = evolve_psi(lax, t)
        F = norm_factor(lax, t)
        assert abs(np.vdot(psi, psi) - F) < 1e-12 * max(1, abs(F))
        assert abs(F.imag) < 1e-12 * abs(F)


def test_p_int_matches_outer_product(ho_seed):
    lax = build_lax(ho_seed)
    np.testing.assert_allclose(p_int(lax, 1.0), _outer_projector(evolve_psi(lax, 1.0)), atol=1e-12)
    np.testing.assert_allclose(p_int(lax, 0.0), _outer_projector(lax.phi0), atol=1e-12)


def test_p_int_static_when_gamma3_zero(ho_seed):
    lax = build_lax(ho_seed, 1.0, 0.0)
    P0 = p_int(lax, 0.0)
    for t in np.linspace(-20, 20, 9):
        np.testing.assert_allclose(p_int(lax, t), P0, atol=1e-13)


@given(st.floats(-30, 30))
def test_p_int_is_rank_one_projector(t):
    lax = build_lax(build_equispaced_seed(1.0, 0.0, 0.3))
    P = p_int(lax, t)
    np.testing.assert_allclose(P @ P, P, atol=1e-10)
    np.testing.assert_allclose(P, P.conj().T, atol=1e-12)
    assert abs(np.trace(P) - 1) < 1e-12


def test_singular_F_raises(ho_seed):
    # with gamma3 = 0 only the decaying exponential survives in F
    lax = build_lax(ho_seed, 1.0, 0.0)
    with pytest.raises(SingularDenominatorError):
        p_int(lax, 200.0)


def test_evolve_phi_is_dressed_psi(ho_seed):
    lax = build_lax(ho_seed)
    V = unitary_exp(ho_seed.lax_hamiltonian, ho_seed.alpha_lambda * 0.7)
    np.testing.assert_allclose(evolve_phi(lax, 0.7), V @ evolve_psi(lax, 0.7), atol=1e-15)


# ---- sandwich

def test_sandwich_real_mu_is_identity():
    rng = np.random.default_rng(1)
    rho = random_density(rng)
    P = _outer_projector(rng.normal(size=3) + 1j * rng.normal(size=3))
    np.testing.assert_array_equal(darboux_sandwich(rho, 0.7, P), rho)


def test_sandwich_commuting_projector():
    rho = np.diag([0.5, 0.3, 0.2]).astype(complex)
    P = np.diag([0, 1, 0]).astype(complex)
    np.testing.assert_allclose(darboux_sandwich(rho, 0.3 + 0.4j, P), rho, atol=1e-15)


def test_sandwich_isospectral_at_zero(ho_seed):
    lax = build_lax(ho_seed)
    out = darboux_sandwich(ho_seed.rho0, ho_seed.mu, p_int(lax, 0.0))
    np.testing.assert_allclose(np.linalg.eigvalsh(out), [1 / 3 - 0.3, 1 / 3, 1 / 3 + 0.3], atol=1e-14)


@given(
    st.integers(0, 10_000),
    st.floats(-2, 2),
    st.floats(0.05, 2).flatmap(lambda b: st.sampled_from([b, -b])),
)
def test_sandwich_is_unitary_conjugation(seed_int, re_mu, im_mu):
    rng = np.random.default_rng(seed_int)
    rho = random_density(rng)
    P = _outer_projector(rng.normal(size=3) + 1j * rng.normal(size=3))
    out = darboux_sandwich(rho, complex(re_mu, im_mu), P)
    np.testing.assert_allclose(out, out.conj().T, atol=1e-12)
    np.testing.assert_allclose(np.linalg.eigvalsh(out), np.linalg.eigvalsh(rho), atol=1e-12)


def test_sandwich_general_mu3_not_hermitian():
    rng = np.random.default_rng(3)
    rho = random_density(rng)
    P = _outer_projector(rng.normal(size=3) + 1j * rng.normal(size=3))
    out = darboux_sandwich(rho, 0.2 + 0.5j, P, mu3=1.0 + 0.1j)
    assert np.linalg.norm(out - out.conj().T) > 1e-6


# ---- closed form

def test_closed_form_matches_sandwich(ho_seed):
    lax = build_lax(ho_seed)
    for t in (-3.0, 0.0, 3.0):
        np.testing.assert_allclose(rho1_closed_form(lax, t), darboux_sandwich(ho_seed.rho0, lax.mu, p_int(lax, t)), atol=1e-10)


def test_literal_coefficient_reading_disagrees(ho_seed):
    lax = build_lax(ho_seed)
    t = 1.0
    ref = darboux_sandwich(ho_seed.rho0, lax.mu, p_int(lax, t))
    assert np.abs(rho1_closed_form(lax, t, literal=True) - ref).max() > 1e-3


def test_closed_form_real_mu_has_no_correction():
    seed = build_equispaced_seed(1.0, 0.0, 0.3)
    lax = build_lax(seed)
    real_lax = type(lax)(
        seed=type(seed)(**{**seed.__dict__, "mu": complex(0.3, 0.0)}),
        gamma1=lax.gamma1,
        gamma3=lax.gamma3,
        phi0=lax.phi0,
        u=lax.u,
        beta=lax.beta,
        a=lax.a,
        b=lax.b,
    )
    np.testing.assert_array_equal(rho1_closed_form(real_lax, 0.4), seed.rho0)


@given(st.complex_numbers(max_magnitude=3, min_magnitude=0.1), st.complex_numbers(max_magnitude=3, min_magnitude=0.1), st.floats(-8, 8))
def test_closed_form_matches_sandwich_random_gammas(g1, g3, t):
    seed = build_equispaced_seed(1.0, 0.05, -0.2)
    lax = build_lax(seed, g1, g3)
    ref = darboux_sandwich(seed.rho0, lax.mu, p_int(lax, t))
    np.testing.assert_allclose(rho1_closed_form(lax, t), ref, atol=1e-10)


# ---- dressing and full solution

def test_dress_identity_at_zero_and_diagonal(ho_seed):
    rng = np.random.default_rng(0)
    R = random_density(rng)
    np.testing.assert_allclose(dress(R, ho_seed.lax_hamiltonian, 2 / 3, 0.0), R, atol=1e-15)
    D = np.diag([0.2, 0.3, 0.5])
    np.testing.assert_allclose(dress(D, ho_seed.lax_hamiltonian, 2 / 3, 1.3), D, atol=1e-15)


def test_dress_phases(ho_sol):
    R = ho_sol.rho_int(1.0)
    out = dress(R, ho_sol.H, ho_sol.seed.alpha_lambda, 1.0)
    h = np.real(np.diag(ho_sol.H))
    for i in range(3):
        for j in range(3):
            phase = np.exp(-1j * ho_sol.seed.alpha_lambda * (h[i] - h[j]) * 1.0)
            assert abs(out[i, j] - R[i, j] * phase) < 1e-14


def test_asymptotic_states(ho_sol):
    th, tm = ho_sol.theta, ho_sol.midpoint
    for sign in (-1, 1):
        a = ho_sol.rho_int(tm + sign * 50 / th)
        b = ho_sol.rho_int(tm + sign * 51 / th)
        assert np.abs(a - b).max() < 1e-12


def test_rate_and_midpoint(ho_sol, ha_sol):
    assert ho_sol.theta == pytest.approx(0.3)
    assert ho_sol.midpoint == pytest.approx(np.log(2) / 2 / 0.3)
    assert ha_sol.theta == pytest.approx(0.01 * 15 / 144 / 0.1)


@pytest.mark.parametrize(
    "seed",
    [
        build_equispaced_seed(1.0, 0.0, 0.3),
        build_equispaced_seed(1.0, 0.1, -0.2),
        build_equispaced_seed(0.5, -0.2, 0.25, f=Nonlinearity.power(3)),
        build_inhomogeneous_seed(0.0, 2.0, 0.8, 0.1, 0.3),
        build_inhomogeneous_seed(-1.0, -1 / 9, -1 / 4, 0.1, 1 / 3, f=Nonlinearity((0.2, -0.5, 1.0, 0.4))),
    ],
    ids=["ho", "ho-alpha", "ho-cubic", "custom-alpha", "hydrogen-poly"],
)
def test_dressed_solution_solves_nvne(seed):
    sol = DarbouxSolution.from_seed(seed, 1.0, 0.7 - 0.2j)
    times = sol.midpoint + np.linspace(-4, 4, 21) / abs(sol.theta)
    assert max(nvne_residual_fd(sol, sol.H, seed.f, t) for t in times) < 1e-6
    ref = np.sort(seed.lam)
    for t in times:
        np.testing.assert_allclose(np.linalg.eigvalsh(sol(t)), ref, atol=1e-10)
