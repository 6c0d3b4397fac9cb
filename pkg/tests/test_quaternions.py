import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slicelab.quaternions import (
    QI,
    QJ,
    QK,
    UI,
    UJ,
    UK,
    Quaternion,
    UnitImaginary,
    dot_cross_decompose,
    exp_unit,
    inverse,
    left_matrix,
    mul,
    qinv,
    qmul,
    qnorm,
    random_unit_imaginary,
    slice_decompose,
)

from conftest import q

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
quats = st.builds(Quaternion, finite, finite, finite, finite)


def test_hamilton_table():
    assert mul(QI, QJ).isclose(QK)
    assert mul(QJ, QI).isclose(-QK)
    assert mul(q(1, 1), q(1, -1)).isclose(q(2))
    for u in (QI, QJ, QK):
        assert mul(u, u).isclose(q(-1))


def test_inverse_examples():
    assert inverse(QI).isclose(-QI)
    assert inverse(q(2)).isclose(q(0.5))
    assert inverse(q(1, 1)).isclose(q(0.5, -0.5))


def test_inverse_of_zero_raises():
    with pytest.raises(ZeroDivisionError):
        inverse(q(0, 1e-13))
    with pytest.raises(ZeroDivisionError):
        qinv(np.zeros(4))


@settings(max_examples=200, deadline=None)
@given(quats, quats, quats)
def test_associative_and_norm_multiplicative(a, b, c):
    assert (mul(mul(a, b), c) - mul(a, mul(b, c))).norm() <= 1e-12 * (1 + a.norm() * b.norm() * c.norm())
    assert abs(mul(a, b).norm() - a.norm() * b.norm()) <= 1e-12 * (1 + a.norm() * b.norm())


@settings(max_examples=200, deadline=None)
@given(quats, quats)
def test_real_part_of_product_is_symmetric(a, b):
    assert abs(mul(a, b).w - mul(b, a).w) <= 1e-12 * (1 + a.norm() * b.norm())


@settings(max_examples=100, deadline=None)
@given(quats)
def test_conj_times_self_is_norm_squared(a):
    assert mul(a.conj(), a).isclose(q(a.norm2()), 1e-10 * (1 + a.norm2()))
    if a.norm() > 1e-6:
        assert mul(a, inverse(a)).isclose(q(1), 1e-12)


def test_array_layer_matches_scalar(rng):
    a, b = rng.standard_normal((2, 50, 4))
    ref = np.array([mul(Quaternion.from_array(x), Quaternion.from_array(y)).as_array() for x, y in zip(a, b)])
    assert np.allclose(qmul(a, b), ref, atol=1e-14)
    assert np.allclose(qnorm(a), [Quaternion.from_array(x).norm() for x in a])
    for x, y in zip(a[:5], b[:5]):
        assert np.allclose(left_matrix(x) @ y, qmul(x, y))


def test_unit_imaginary_is_normalized():
    u = UnitImaginary(3.0, 0.0, 4.0)
    assert abs(np.linalg.norm(u.vector) - 1.0) < 1e-12
    assert u.as_quaternion().w == 0.0
    assert mul(u.as_quaternion(), u.as_quaternion()).isclose(q(-1), 1e-12)
    with pytest.raises(ValueError):
        UnitImaginary(0.0, 0.0, 0.0)


def test_dot_cross_examples():
    d, c = dot_cross_decompose(UI, UJ)
    assert d == 0.0 and c.isclose(QK)
    d, c = dot_cross_decompose(UI, UI)
    assert d == 1.0 and c.isclose(Quaternion())
    d, c = dot_cross_decompose(UI, -UI)
    assert d == -1.0 and c.isclose(Quaternion())


def test_dot_cross_reconstructs_product(rng):
    for _ in range(100):
        K, J = random_unit_imaginary(rng), random_unit_imaginary(rng)
        d, c = dot_cross_decompose(K, J)
        assert c.w == 0.0
        assert (mul(K.as_quaternion(), J.as_quaternion()) - (c - d)).norm() < 1e-12
        anti = mul(K.as_quaternion(), J.as_quaternion()) + mul(J.as_quaternion(), K.as_quaternion())
        assert anti.isclose(q(-2 * float(K.vector @ J.vector)), 1e-12)


def test_exp_unit_examples():
    assert exp_unit(0.0, UI).isclose(q(1), 1e-12)
    assert exp_unit(math.pi / 2, UJ).isclose(QJ, 1e-12)
    assert exp_unit(math.pi, UK).isclose(q(-1), 1e-12)
    assert abs(exp_unit(1.234, UnitImaginary(1, 2, 3)).norm() - 1.0) < 1e-12


def test_slice_decompose_examples():
    x, y, I = slice_decompose(q(1, 2))
    assert (x, y) == (1.0, 2.0) and I == UI
    assert slice_decompose(q(3)) == (3.0, 0.0, None)
    x, y, I = slice_decompose(q(1, -2))
    assert (x, y) == (1.0, 2.0) and np.allclose(I.vector, [-1, 0, 0])


def test_random_unit_imaginary_reproducible():
    a = random_unit_imaginary(np.random.default_rng(5))
    b = random_unit_imaginary(np.random.default_rng(5))
    assert a == b


def test_json_roundtrip():
    a = Quaternion(0.1, -2.5, 1e-300, 3.0)
    assert Quaternion.from_array(a.to_json()) == a
