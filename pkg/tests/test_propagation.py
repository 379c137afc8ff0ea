import logging
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from genut import moments as M
from genut.errors import EvaluationError, ParameterDomainError, ShapeMismatchError
from genut.propagation import (
    make_transform,
    propagate,
    sample_covariance,
    sample_kurt_diag,
    sample_mean,
    sample_skew_diag,
    summarize,
    transform_points,
)
from genut.bench import CASE3_STATE, sir_map
from genut.sigma import SigmaPointSet, generate
from genut.ut import ut_sigma_points

from .strategies import random_spec
from .test_moments import dists

PAIR = M.independent_joint([M.poisson(1.5), M.poisson(1)])


def test_identity_leaves_points():
    s = generate(PAIR)
    np.testing.assert_array_equal(transform_points(s, make_transform("identity")), s.points)


def test_quadratic_per_point_and_mean():
    s = generate(M.independent_joint([M.poisson(2)]))
    y = transform_points(s, make_transform("quadratic", {"alpha": 3, "beta": 2}))
    x = s.points[0]
    np.testing.assert_allclose(y[0], [3 * xi + 2 * xi * xi for xi in x], rtol=1e-15)
    r = propagate(s, make_transform("quadratic"))
    assert r.mean[0] == pytest.approx(18.0, rel=1e-14)
    # Var(3x + 2x^2) from raw moments of Poisson(2): 2, 6, 22, 94
    m1, m2, m3, m4 = 2, 6, 22, 94
    var = 9 * m2 + 12 * m3 + 4 * m4 - (3 * m1 + 2 * m2) ** 2
    assert r.covariance[0, 0] == pytest.approx(var, rel=1e-12)


def test_sir_per_point():
    s = generate(M.independent_joint([M.poisson(10), M.poisson(2)]))
    y = transform_points(s, lambda x: sir_map(x, CASE3_STATE))
    for i in range(5):
        x1, x2 = s.points[:, i]
        assert y[0, i] == pytest.approx(10 + 1.5 * (100 - x1 - x2) * x1 / 100, rel=1e-14)
        assert y[1, i] == pytest.approx(2 + 0.3 * x1, rel=1e-14)


def test_statistics_of_first_example():
    s = generate(PAIR)
    m = sample_mean(s.points, s.weights)
    np.testing.assert_allclose(m, [1.5, 1], atol=1e-12)
    np.testing.assert_allclose(sample_covariance(s.points, s.weights, m), np.diag([1.5, 1]), atol=1e-12)
    np.testing.assert_allclose(sample_skew_diag(s.points, s.weights, m), [1.5, 1], atol=1e-12)
    np.testing.assert_allclose(sample_kurt_diag(s.points, s.weights, m), [8.25, 4], atol=1e-12)


def test_constant_and_symmetric_points():
    w = np.array([0.5, 0.25, 0.25])
    c = np.full((2, 3), 4.0)
    assert sample_mean(c, w).tolist() == [4.0, 4.0]
    np.testing.assert_array_equal(sample_covariance(c, w, [4, 4]), np.zeros((2, 2)))
    sym = np.array([[0.0, -1.0, 1.0]])
    assert sample_skew_diag(sym, w, [0.0])[0] == 0


def test_shape_errors():
    with pytest.raises(ShapeMismatchError):
        sample_mean(np.ones((2, 3)), np.ones(4))
    with pytest.raises(ShapeMismatchError):
        sample_covariance(np.ones((2, 3)), np.ones(3), [0, 0, 0])


def test_non_finite_output_names_point():
    s = generate(PAIR)
    with pytest.raises(EvaluationError) as exc:
        transform_points(s, lambda x: np.where(x < 0, np.nan, x))
    assert exc.value.index == 1


def test_indefinite_covariance_is_reported(caplog):
    pts = np.array([[0.0, 1.0, -1.0]])
    with caplog.at_level(logging.WARNING, logger="genut.propagation"):
        r = summarize(pts, [2.0, -0.5, -0.5])
    assert r.min_eigenvalue < 0
    assert "indefinite" in caplog.text


def test_registry():
    f = make_transform("sincos")
    np.testing.assert_allclose(f(np.array([2.0, 0.5])), [math.sin(1.0), math.cos(1.0)])
    np.testing.assert_allclose(make_transform("sir")(np.array([10.0, 2.0])), [23.2, 5.0])
    with pytest.raises(ParameterDomainError):
        make_transform("exp")
    with pytest.raises(ParameterDomainError):
        make_transform("sin", {"omega": 2})


def test_result_json():
    r = propagate(generate(PAIR), make_transform("sincos"))
    d = r.to_dict()
    assert set(d) >= {"mean", "covariance", "skew_diag", "kurt_diag", "transformed_points", "min_eigenvalue"}
    assert np.asarray(d["transformed_points"]).shape == (2, 5)


@given(st.integers(0, 2**32 - 1), st.integers(1, 10), st.integers(1, 6), st.booleans())
def test_affine_exactness(seed, n, m, use_ut):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, n)
    A = rng.normal(size=(m, n))
    b = rng.normal(size=m)
    s = ut_sigma_points(spec.mean, spec.covariance) if use_ut else generate(spec)
    r = propagate(s, lambda x: A @ x + b)
    ref_mean = A @ spec.mean + b
    ref_cov = A @ spec.covariance @ A.T
    scale = np.abs(A).sum(axis=1).max() * max(1, np.abs(spec.mean).max())
    np.testing.assert_allclose(r.mean, ref_mean, rtol=0, atol=1e-12 * scale)
    np.testing.assert_allclose(r.covariance, ref_cov, rtol=0, atol=1e-12 * np.abs(A).max() ** 2 * n * np.abs(spec.covariance).max())


@given(dists, st.floats(-5, 5), st.floats(-5, 5))
def test_quadratic_exact_in_one_dimension(d, alpha, beta):
    m1, m2, m3, m4 = M.moments_of(d).raw()
    mean = alpha * m1 + beta * m2
    var = alpha**2 * m2 + 2 * alpha * beta * m3 + beta**2 * m4 - mean**2
    spec = M.independent_joint([d])
    r = propagate(generate(spec), make_transform("quadratic", {"alpha": alpha, "beta": beta}))
    # cancellation in var = E[y^2] - E[y]^2 bounds attainable relative accuracy
    scale_m = abs(alpha) * abs(m1) + abs(beta) * m2
    scale_v = alpha**2 * m2 + 2 * abs(alpha * beta * m3) + beta**2 * m4
    assert abs(r.mean[0] - mean) <= 1e-10 * max(abs(mean), scale_m, 1e-300)
    assert abs(r.covariance[0, 0] - var) <= 1e-10 * max(abs(var), scale_v * 1e-3, 1e-300)
    u = propagate(ut_sigma_points(spec.mean, spec.covariance), make_transform("quadratic", {"alpha": alpha, "beta": beta}))
    assert abs(u.mean[0] - mean) <= 1e-10 * max(abs(mean), scale_m, 1e-300)
