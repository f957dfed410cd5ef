import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sl2mag.errors import NonUnitDeterminant
from sl2mag.lie_core import (
    E1,
    E2,
    E3,
    SQRT2,
    AlgebraVector,
    MobiusClass,
    Sl2Matrix,
    bracket,
    classify_mobius,
    compose,
    exp_algebra,
    exp_curve,
    exp_oracle,
    iwasawa_arrays,
    iwasawa_decompose,
    k_part,
    mobius_action,
)

finite = st.floats(-3, 3, allow_nan=False)


def test_matrix_form_of_basis():
    assert np.array_equal(E1.matrix(), [[0, SQRT2], [0, 0]])
    assert np.array_equal(E2.matrix(), [[0, 0], [SQRT2, 0]])
    assert np.array_equal(E3.matrix(), [[1, 0], [0, -1]])


def test_norm_matches_half_trace_inner_product():
    X = AlgebraVector(0.3, -1.2, 0.7)
    M = X.matrix()
    assert X.norm() ** 2 == pytest.approx(0.5 * np.trace(M.T @ M), abs=1e-15)


def test_bracket_table():
    assert bracket(E1, E2) == AlgebraVector(0, 0, 2)
    assert bracket(E2, E3) == AlgebraVector(0, 2, 0)
    assert bracket(E3, E1) == AlgebraVector(2, 0, 0)


@given(finite, finite, finite, finite, finite, finite)
def test_bracket_is_matrix_commutator(a, b, c, d, e, f):
    X, Y = AlgebraVector(a, b, c), AlgebraVector(d, e, f)
    M = X.matrix() @ Y.matrix() - Y.matrix() @ X.matrix()
    assert np.allclose(bracket(X, Y).matrix(), M, atol=1e-12)


@pytest.mark.parametrize(
    "mat, expected",
    [
        ([[1, 0], [0, 1]], (0.0, 1.0, 0.0)),
        ([[1, 1], [0, 1]], (1.0, 1.0, 0.0)),
        ([[math.e, 0], [0, 1 / math.e]], (0.0, math.e ** 2, 0.0)),
    ],
)
def test_iwasawa_examples(mat, expected):
    c = iwasawa_decompose(Sl2Matrix.from_array(mat))
    assert (c.x, c.y, c.theta) == pytest.approx(expected, abs=1e-14)


def test_iwasawa_rejects_non_unit_determinant():
    with pytest.raises(NonUnitDeterminant):
        iwasawa_decompose(Sl2Matrix(2.0, 0.0, 0.0, 1.0))


def test_iwasawa_theta_principal_value():
    c = iwasawa_decompose(Sl2Matrix.from_array(k_part(math.pi)))
    assert c.theta == pytest.approx(math.pi)
    c = iwasawa_decompose(Sl2Matrix.from_array(k_part(-3.0)))
    assert c.theta == pytest.approx(-3.0)


def test_iwasawa_round_trip_random():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        x, y, th = rng.uniform(-5, 5), math.exp(rng.uniform(-3, 3)), rng.uniform(-math.pi, math.pi)
        P = compose(x, y, th)
        back = iwasawa_decompose(P).to_matrix()
        worst = max(worst, np.abs(back.as_array() - P.as_array()).max())
    assert worst < 1e-12


def test_iwasawa_arrays_vectorised():
    mats = np.stack([compose(1.0, 2.0, 0.5).as_array(), compose(-3.0, 0.1, -2.0).as_array()])
    x, y, th = iwasawa_arrays(mats)
    assert np.allclose(x, [1.0, -3.0]) and np.allclose(y, [2.0, 0.1]) and np.allclose(th, [0.5, -2.0])


def test_exp_closed_form_cases():
    t = 0.83
    assert np.allclose(exp_algebra(E1, t).as_array(), [[1, SQRT2 * t], [0, 1]], atol=1e-15)
    assert np.allclose(exp_algebra(E3, t).as_array(), np.diag([math.exp(t), math.exp(-t)]), atol=1e-15)
    assert exp_algebra(AlgebraVector(0.4, 2.0, -1.0), 0.0) == Sl2Matrix.identity()


def test_exp_reeb_direction_is_rotation():
    X = E1 - E2
    for t in (0.3, 1.0, math.pi / SQRT2):
        P = exp_algebra(X, t).as_array()
        assert np.allclose(P, k_part(SQRT2 * t), atol=1e-14)
        assert np.allclose(P @ P.T, np.eye(2), atol=1e-14)


def test_oracle_examples():
    assert np.allclose(exp_oracle(E3, 1.0).as_array(), np.diag([math.e, 1 / math.e]), atol=1e-12)
    assert exp_oracle(E1, 0.0).as_array().tolist() == [[1.0, 0.0], [0.0, 1.0]]


def test_oracle_converged_under_extra_squaring():
    X = AlgebraVector(1.1, -0.4, 2.0)
    A = exp_oracle(X, 2.5).as_array()
    B = exp_oracle(X, 2.5, extra_squarings=3).as_array()
    assert np.abs(A - B).max() / np.abs(A).max() < 1e-12


def test_exp_matches_oracle_relative():
    rng = np.random.default_rng(3)
    for _ in range(200):
        X = AlgebraVector(*rng.uniform(-1.7, 1.7, 3))
        t = rng.uniform(-5, 5)
        A, B = exp_algebra(X, t).as_array(), exp_oracle(X, t).as_array()
        assert np.abs(A - B).max() <= 1e-13 * max(1.0, np.abs(B).max())


@settings(max_examples=60, deadline=None)
@given(finite, finite, finite, st.floats(-2, 2), st.floats(-2, 2))
def test_one_parameter_property(a, b, c, s, t):
    X = AlgebraVector(a, b, c)
    lhs = exp_algebra(X, s + t).as_array()
    rhs = exp_algebra(X, s).as_array() @ exp_algebra(X, t).as_array()
    assert np.abs(lhs - rhs).max() <= 1e-10 * max(1.0, np.abs(lhs).max())


@given(finite, finite, finite, st.floats(-4, 4))
def test_exp_has_unit_determinant(a, b, c, t):
    P = exp_algebra(AlgebraVector(a, b, c), t)
    assert abs(P.det - 1.0) <= 1e-12 * max(1.0, np.abs(P.as_array()).max() ** 2)


def test_exp_curve_agrees_with_pointwise():
    X = AlgebraVector(0.2, 0.9, -0.5)
    ts = np.linspace(-2, 2, 9)
    stack = exp_curve(X, ts)
    for t, M in zip(ts, stack):
        assert np.allclose(M, exp_algebra(X, t).as_array(), atol=1e-15)


@pytest.mark.parametrize(
    "mat, cls",
    [
        (k_part(math.pi / 4), MobiusClass.ELLIPTIC),
        ([[1, 1], [0, 1]], MobiusClass.PARABOLIC),
        ([[2, 0], [0, 0.5]], MobiusClass.HYPERBOLIC),
        ([[-1, 0], [0, -1]], MobiusClass.IDENTITY),
        (np.eye(2), MobiusClass.IDENTITY),
    ],
)
def test_classify_mobius_examples(mat, cls):
    assert classify_mobius(Sl2Matrix.from_array(mat)) is cls


@pytest.mark.parametrize(
    "X, cls",
    [
        (AlgebraVector(1.0, 0.0, 0.0), MobiusClass.PARABOLIC),
        (AlgebraVector(1.0, -1.0, 0.5), MobiusClass.ELLIPTIC),
        (AlgebraVector(0.3, 0.2, 1.0), MobiusClass.HYPERBOLIC),
        (AlgebraVector(1.0, -1.0, SQRT2), MobiusClass.PARABOLIC),
    ],
)
def test_exp_class_follows_det_sign(X, cls):
    for t in (0.05, -0.1, 0.3):
        assert classify_mobius(exp_algebra(X, t)) is cls


def test_mobius_action_fixes_i_for_rotations():
    assert mobius_action(Sl2Matrix.from_array(k_part(0.7)), 1j) == pytest.approx(1j)
