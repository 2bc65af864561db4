import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from darboux_nvne.nonlinearity import QUADRATIC, Nonlinearity

coeff = st.floats(-2, 2, allow_nan=False)


def test_power_and_degree():
    assert Nonlinearity.power(3).coeffs == (0.0, 0.0, 0.0, 1.0)
    assert Nonlinearity.power(3).degree == 3
    with pytest.raises(ValueError):
        Nonlinearity.power(0)


def test_rejects_empty_and_nonfinite():
    with pytest.raises(ValueError):
        Nonlinearity(())
    with pytest.raises(ValueError):
        Nonlinearity((1.0, float("nan")))


def test_pure_quadratic_detection():
    assert QUADRATIC.is_pure_quadratic
    assert QUADRATIC.with_offset(5).is_pure_quadratic
    assert Nonlinearity((3.0, 0.0, 1.0)).is_pure_quadratic
    assert not Nonlinearity((0.0, 1.0, 1.0)).is_pure_quadratic
    assert not Nonlinearity.power(3).is_pure_quadratic
    assert not Nonlinearity((0.0, 0.0, 2.0)).is_pure_quadratic


def test_relative_to_vanishes_at_anchor():
    f = Nonlinearity((0.5, -1.0, 2.0, 0.3))
    assert f.relative_to(0.7)(0.7) == pytest.approx(0.0, abs=1e-15)


@given(st.lists(coeff, min_size=1, max_size=4), st.floats(-1, 1), st.floats(-2, 2))
def test_composed_shift_is_substitution(cs, s, x):
    f = Nonlinearity(tuple(cs))
    assert f.composed_shift(s)(x) == pytest.approx(f(x + s), abs=1e-10)


@given(st.lists(coeff, min_size=1, max_size=4), st.floats(-3, 3))
def test_offset_adds_identity_multiple(cs, c):
    f = Nonlinearity(tuple(cs))
    M = np.array([[0.3, 0.1j], [-0.1j, 0.7]])
    np.testing.assert_allclose(f.with_offset(c).of_matrix(M) - f.of_matrix(M), c * np.eye(2), atol=1e-12)


def test_matrix_and_hermitian_paths_agree():
    f = Nonlinearity((0.1, -0.4, 0.0, 1.0))
    M = np.array([[0.5, 0.2 - 0.1j, 0], [0.2 + 0.1j, 0.3, 0.05], [0, 0.05, 0.2]])
    np.testing.assert_allclose(f.of_matrix(M), f.of_hermitian(M), atol=1e-14)


@given(
    st.lists(st.floats(-2, 2), min_size=1, max_size=5),
    st.floats(-1.5, 1.5),
    st.floats(-1.5, 1.5),
)
def test_divided_difference_matches_quotient(coeffs, x, y):
    f = Nonlinearity(tuple(coeffs))
    assume(abs(x - y) > 1e-3)
    assert f.divided_difference(x, y) == pytest.approx((f(x) - f(y)) / (x - y), rel=1e-9, abs=1e-9)


def test_divided_difference_confluent_is_derivative():
    f = Nonlinearity((0.5, -1.0, 0.0, 2.0))
    assert f.divided_difference(0.7, 0.7) == pytest.approx(-1.0 + 6 * 0.49, abs=1e-15)


def test_divided_difference_avoids_cancellation():
    # (19/30)^2 - (1/3)^2 over 19/30 - 1/3 is exactly 29/30
    assert QUADRATIC.divided_difference(19 / 30, 1 / 3) == 19 / 30 + 1 / 3
