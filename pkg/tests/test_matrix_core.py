import numpy as np
import pytest
import scipy.linalg
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from darboux_nvne.matrix_core import (
    DensityMatrixError,
    ValidationError,
    apply_spectral_function,
    commutator,
    eig_hermitian,
    fix_phase,
    matrix_polynomial,
    unitary_exp,
    validate_density,
)

finite = st.floats(-3, 3, allow_nan=False, allow_infinity=False)


def hermitian(n):
    return arrays(np.float64, (2, n, n), elements=finite).map(
        lambda a: (a[0] + 1j * a[1]) + (a[0] + 1j * a[1]).conj().T
    )


# ---- eig_hermitian

def test_eig_diagonal():
    S = eig_hermitian(np.diag([1.0, 2.0, 3.0]))
    np.testing.assert_allclose(S.eigenvalues, [1, 2, 3])
    for k, P in enumerate(S.projectors):
        E = np.zeros((3, 3))
        E[k, k] = 1
        np.testing.assert_allclose(P, E, atol=1e-15)


def test_eig_pauli_x():
    S = eig_hermitian([[0, 1], [1, 0]])
    np.testing.assert_allclose(S.eigenvalues, [-1, 1], atol=1e-15)
    np.testing.assert_allclose(S.projectors[0], 0.5 * np.array([[1, -1], [-1, 1]]), atol=1e-15)
    np.testing.assert_allclose(S.projectors[1], 0.5 * np.array([[1, 1], [1, 1]]), atol=1e-15)


def test_eig_seed_matches_characteristic_polynomial(ho_seed):
    # independent oracle: roots of det(x - rho) from numpy.poly
    roots = np.sort(np.roots(np.poly(ho_seed.rho0)).real)
    S = eig_hermitian(ho_seed.rho0)
    np.testing.assert_allclose(S.eigenvalues, roots, atol=1e-12)
    np.testing.assert_allclose(S.eigenvalues, [1 / 3 - 0.3, 1 / 3, 1 / 3 + 0.3], atol=1e-14)


def test_eig_merges_degenerate_cluster():
    S = eig_hermitian(np.diag([0.5, 0.5 + 1e-12, 2.0]))
    assert len(S.eigenvalues) == 2
    assert S.multiplicities() == [2, 1]


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValidationError) as exc:
        eig_hermitian([[0, 1], [0, 0]])
    assert "hermiticity" in exc.value.invariants


def test_eig_rejects_nan():
    with pytest.raises(ValidationError) as exc:
        eig_hermitian([[np.nan, 0], [0, 1]])
    assert exc.value.invariants == ["finite"]


@given(hermitian(3))
def test_eig_reconstructs_and_projectors_are_orthogonal(M):
    S = eig_hermitian(M)
    np.testing.assert_allclose(S.reconstruct(), M, atol=1e-9)
    np.testing.assert_allclose(sum(S.projectors), np.eye(3), atol=1e-10)
    for i, P in enumerate(S.projectors):
        np.testing.assert_allclose(P @ P, P, atol=1e-10)
        for Q in S.projectors[i + 1:]:
            np.testing.assert_allclose(P @ Q, 0, atol=1e-10)
    assert np.all(np.diff(S.eigenvalues) > 0)


# ---- spectral functions

def test_square_of_diag():
    np.testing.assert_allclose(apply_spectral_function(lambda x: x**2, eig_hermitian(np.diag([1.0, 2.0]))), np.diag([1, 4]))


def test_square_of_seed(ho_seed):
    out = apply_spectral_function(lambda x: x**2, eig_hermitian(ho_seed.rho0))
    np.testing.assert_allclose(np.linalg.eigvalsh(out), [(1 / 3 - 0.3) ** 2, 1 / 9, (1 / 3 + 0.3) ** 2], atol=1e-14)
    np.testing.assert_allclose(out, ho_seed.rho0 @ ho_seed.rho0, atol=1e-14)


@given(hermitian(3))
def test_identity_function_reconstructs(M):
    np.testing.assert_allclose(apply_spectral_function(lambda x: x, eig_hermitian(M)), M, atol=1e-9)


@given(hermitian(3), st.lists(finite, min_size=1, max_size=5))
def test_horner_matches_spectral(M, coeffs):
    poly = np.polynomial.Polynomial(coeffs)
    np.testing.assert_allclose(
        matrix_polynomial(coeffs, M), apply_spectral_function(poly, eig_hermitian(M)), atol=1e-6 * (1 + np.abs(M).max() ** 4)
    )


# ---- commutator

def test_commutator_examples():
    A = np.array([[1, 2], [3, 4]])
    np.testing.assert_array_equal(commutator(A, A), 0)
    np.testing.assert_array_equal(commutator(np.diag([1, 2]), np.diag([3, 4])), 0)
    np.testing.assert_array_equal(commutator([[0, 1], [0, 0]], [[0, 0], [1, 0]]), np.diag([1, -1]))


def test_commutator_dimension_mismatch():
    with pytest.raises(ValueError, match="dimension"):
        commutator(np.eye(2), np.eye(3))


@given(hermitian(3), hermitian(3))
def test_commutator_antihermitian_and_traceless(A, B):
    C = commutator(A, B)
    np.testing.assert_allclose(C, -C.conj().T, atol=1e-10)
    assert abs(np.trace(C)) < 1e-10


# ---- density validation

def test_validate_density_ok():
    np.testing.assert_array_equal(validate_density(np.eye(3) / 3), np.eye(3) / 3)


def test_validate_density_trace():
    with pytest.raises(DensityMatrixError) as exc:
        validate_density(np.diag([0.7, 0.4]))
    (v,) = exc.value.violations
    assert v.invariant == "trace" and v.measured == pytest.approx(0.1)


def test_validate_density_positivity():
    with pytest.raises(DensityMatrixError) as exc:
        validate_density(np.diag([1.2, -0.2]))
    (v,) = exc.value.violations
    assert v.invariant == "positivity" and v.measured == pytest.approx(-0.2)


def test_validate_density_lists_all_violations():
    with pytest.raises(DensityMatrixError) as exc:
        validate_density([[1.5, 1.0], [0.0, -0.2]])
    assert set(exc.value.invariants) == {"hermiticity", "trace", "positivity"}


# ---- unitary_exp and phase convention

@given(hermitian(3), st.floats(-2, 2))
def test_unitary_exp_matches_expm(H, s):
    np.testing.assert_allclose(unitary_exp(H, s), scipy.linalg.expm(-1j * s * H), atol=1e-9)


def test_fix_phase_first_component_real_positive():
    v = fix_phase(np.array([0, 1j, 1]))
    assert v[1].real > 0 and v[1].imag == 0
    np.testing.assert_allclose(np.abs(v), [0, 1, 1])
