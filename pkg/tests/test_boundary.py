import csv
import io
import math

import numpy as np
import pytest

from slicelab.boundary import (
    TRACE_COLUMNS,
    ess_sup_estimate,
    evaluate_on_grid,
    evaluate_on_mirror_grid,
    fibonacci_sphere,
    integrate,
    make_grid,
    modulophi_residual,
    representation,
    representation_symmetric,
    slice_inner,
    sphere_spread,
    unimodularity_residual,
    write_trace_csv,
    zero_set_fraction,
)
from slicelab.errors import DegenerateUnits
from slicelab.idempotents import build_idempotent, ell_spec
from slicelab.quaternions import (
    QI,
    UI,
    UJ,
    UK,
    Quaternion,
    UnitImaginary,
    exp_unit,
    qnorm,
    random_unit_imaginary,
)
from slicelab.series import SliceLaurentSeries, evaluate, evaluate_points, l2_inner, random_series, symmetrize

S = SliceLaurentSeries


def test_grid_weights_and_nodes():
    g = make_grid(4, 8)
    assert g.size == 32
    assert np.allclose(g.weights, 1 / 32)
    assert abs(g.weights.sum() - 1) < 1e-10
    assert abs(g.sphere_weights.sum() - 1) < 1e-12
    assert np.all((g.t_nodes > 0) & (g.t_nodes < math.pi))
    assert not g.includes_reals
    with pytest.raises(ValueError):
        make_grid(1, 8)


def test_fibonacci_lattice_is_unit_and_hits_poles():
    v = fibonacci_sphere(257)
    assert np.allclose(np.linalg.norm(v, axis=1), 1.0)
    assert np.allclose(v[0], [0, 0, 1]) and np.allclose(v[-1], [0, 0, -1])
    assert np.allclose(v.mean(axis=0), 0.0, atol=0.01)


def test_integrate_constant_and_parseval(rng):
    g = make_grid(64, 128)
    assert abs(integrate(np.ones((64, 128)), g) - 1) < 1e-12
    for n in (0, 3, 8):
        a = rng.standard_normal(4)
        vals = qnorm(evaluate_on_grid(S.monomial(n, a), g)) ** 2
        assert abs(integrate(vals, g) - float(a @ a)) < 1e-6


def test_grid_evaluation_matches_points(rng):
    f = random_series(rng, -3, 5)
    g = make_grid(5, 7)
    ref = evaluate_points(f, g.points().reshape(-1, 4)).reshape(5, 7, 4)
    assert np.allclose(evaluate_on_grid(f, g), ref, atol=1e-12)
    mirror = g.points().copy()
    mirror[..., 1:] *= -1
    assert np.allclose(evaluate_on_mirror_grid(f, g),
                       evaluate_points(f, mirror.reshape(-1, 4)).reshape(5, 7, 4), atol=1e-12)


def test_representation_constants_and_identity(rng):
    c = Quaternion(1, 2, 3, 4)
    J, K, I = (random_unit_imaginary(rng) for _ in range(3))
    assert representation(c, c, J, K, I).isclose(c, 1e-12)
    t = 0.9
    got = representation(exp_unit(t, J), exp_unit(t, K), J, K, I)
    assert got.isclose(exp_unit(t, I), 1e-12)
    with pytest.raises(DegenerateUnits):
        representation(c, c, J, J, I)


def test_representation_reproduces_evaluate(rng):
    for _ in range(20):
        f = random_series(rng, -6, 6)
        x, y = rng.standard_normal(), abs(rng.standard_normal())
        J, K, I = (random_unit_imaginary(rng) for _ in range(3))

        def at(U):
            return evaluate(f, Quaternion(x, *(y * U.vector)))

        assert (representation(at(J), at(K), J, K, I) - at(I)).norm() < 1e-11 * (1 + at(I).norm())
        sym = representation_symmetric(at(J), at(-J), J, I)
        assert (sym - at(I)).norm() < 1e-11 * (1 + at(I).norm())
        assert (representation(at(J), at(-J), J, -J, I) - sym).norm() < 1e-11 * (1 + sym.norm())


def test_slice_inner_examples(rng):
    assert slice_inner(S.monomial(3), S.monomial(3), UJ, 16).isclose(Quaternion(1), 1e-12)
    f = S(0, [[1, 0, 0, 0], QI.as_array()])
    g = S.monomial(1, QI.as_array())
    for I in (UI, UJ, UnitImaginary(1, 2, 3)):
        assert slice_inner(f, g, I, 8).isclose(Quaternion(1), 1e-12)
    for _ in range(10):
        f, g = random_series(rng, -8, 8), random_series(rng, -8, 8)
        I = random_unit_imaginary(rng)
        assert (slice_inner(f, g, I, 64) - l2_inner(f, g)).norm() < 1e-10
    with pytest.raises(ValueError):
        slice_inner(S.monomial(8), S.monomial(0), UI, 16)


def test_ess_sup_examples(rng):
    g = make_grid(16, 32)
    c = Quaternion(1, -2, 0.5, 0)
    assert abs(ess_sup_estimate(S.constant(c), g) - c.norm()) < 1e-12
    u = Quaternion(0.5, 0.5, 0.5, 0.5)
    assert abs(ess_sup_estimate(S.monomial(4, u.as_array()), g) - 1) < 1e-12
    ell = build_idempotent(ell_spec(UK), 128)
    assert abs(ess_sup_estimate(ell, make_grid(128, 256)) - 1) < 1e-6


def test_unimodularity_examples():
    g = make_grid(16, 32)
    u = Quaternion(0, 0.6, 0, 0.8)
    assert unimodularity_residual(S.monomial(1, u.as_array()), g) < 1e-12
    assert unimodularity_residual(S.monomial(1, [2, 0, 0, 0]), g) >= 1


def test_modulophi_identity(rng):
    g = make_grid(32, 64)
    for _ in range(10):
        phi = random_series(rng, -4, 4)
        assert modulophi_residual(phi, g) < 1e-9 * (1 + phi.l1_norm() ** 2)


def test_symmetrization_modulus_is_sphere_constant(rng):
    g = make_grid(16, 64)
    for _ in range(5):
        fs = symmetrize(random_series(rng, -3, 4))
        assert sphere_spread(fs, g) < 1e-10


def test_zero_set_fraction_detects_sphere():
    g = make_grid(8, 32)
    t0 = float(g.t_nodes[3])
    f = S(0, [[-math.cos(t0), -math.sin(t0), 0, 0], [1, 0, 0, 0]])  # q - e^{t0 i}
    assert zero_set_fraction(symmetrize(f), g) == pytest.approx(1 / 8)
    assert zero_set_fraction(S.constant(1.0), g) == 0.0


def test_trace_csv_layout():
    g = make_grid(3, 4)
    buf = io.StringIO()
    n = write_trace_csv(S.constant(1.0), g, buf)
    rows = list(csv.reader(io.StringIO(buf.getvalue())))
    assert rows[0] == TRACE_COLUMNS
    assert n == len(rows) - 1 == 12
    ts = [float(r[0]) for r in rows[1:]]
    assert ts == sorted(ts)  # t-major
    assert all(float(r[-1]) == 1.0 for r in rows[1:])
