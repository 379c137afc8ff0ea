import math
import warnings

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from genut import moments as M
from genut.errors import (
    AssumptionViolationError,
    FactorizationError,
    FeasibilityError,
    InfeasibleVError,
    ParameterDomainError,
)
from genut.moments import MomentSpec
from genut.propagation import sample_covariance, sample_kurt_diag, sample_mean, sample_skew_diag
from genut.sigma import (
    BoxConstraint,
    ReducedAccuracyWarning,
    SigmaPointSet,
    check_feasibility,
    constrain,
    generate,
    generate_constrained,
    kurtosis_matching_u,
)
from genut.ut import ut_sigma_points

from .strategies import random_spec

SCALAR = MomentSpec([0.1], [[0.2]], [-0.5], [1.3])
PAIR = M.independent_joint([M.poisson(1.5), M.poisson(1)])


def stats_of(s):
    m = sample_mean(s.points, s.weights)
    return m, sample_covariance(s.points, s.weights, m), sample_skew_diag(s.points, s.weights, m), sample_kurt_diag(
        s.points, s.weights, m
    )


# --- examples with printed values -------------------------------------------


def test_scalar_example():
    s = generate(SCALAR)
    assert s.u[0] == pytest.approx(5.8055, abs=5e-4)
    assert s.v[0] == pytest.approx(0.2153, abs=5e-4)
    np.testing.assert_allclose(s.weights, [0.2, 0.0286, 0.7714], atol=5e-4)


def test_poisson_pair():
    s = generate(PAIR)
    np.testing.assert_allclose(kurtosis_matching_u(PAIR), [1.3713, 1.3028], atol=5e-4)
    np.testing.assert_allclose(
        s.points, [[1.5, -0.1794, 1.5, 4.1794, 1.5], [1, 1, -0.3028, 1, 3.3028]], atol=5e-4
    )
    np.testing.assert_allclose(s.weights, [0.3333, 0.2049, 0.2129, 0.1284, 0.1204], atol=5e-4)
    m, P, S, K = stats_of(s)
    np.testing.assert_allclose(m, [1.5, 1], atol=1e-10)
    np.testing.assert_allclose(P, np.diag([1.5, 1]), atol=1e-10)
    np.testing.assert_allclose(S, [1.5, 1], atol=1e-10)
    np.testing.assert_allclose(K, [8.25, 4], atol=1e-10)


def test_constrained_pair():
    s = generate_constrained(PAIR, BoxConstraint.lower_only([0, 0], 0.9))
    np.testing.assert_allclose(s.u, [1.1023, 0.9], atol=5e-4)
    np.testing.assert_allclose(s.v, [1.9188, 1.9], atol=5e-4)
    np.testing.assert_allclose(s.weights, [-0.0576, 0.3003, 0.3968, 0.1725, 0.188], atol=5e-4)
    np.testing.assert_allclose(s.points, [[1.5, 0.15, 1.5, 3.85, 1.5], [1, 1, 0.1, 1, 2.9]], atol=5e-4)
    assert np.all(s.points >= 0)
    m, P, S, K = stats_of(s)
    np.testing.assert_allclose(m, [1.5, 1], atol=1e-10)
    np.testing.assert_allclose(P, np.diag([1.5, 1]), atol=1e-10)
    np.testing.assert_allclose(S, [1.5, 1], atol=1e-10)
    np.testing.assert_allclose(K, [6.2587, 2.7100], atol=5e-4)


def test_gaussian_one_dimensional():
    mu, var = 0.7, 2.5
    s = generate(M.independent_joint([M.gaussian(mu, var)]))
    sd = math.sqrt(var)
    np.testing.assert_allclose(s.points[0], [mu, mu - math.sqrt(3) * sd, mu + math.sqrt(3) * sd], rtol=1e-14)
    np.testing.assert_allclose(s.weights, [2 / 3, 1 / 6, 1 / 6], rtol=1e-14)
    np.testing.assert_allclose(kurtosis_matching_u(M.independent_joint([M.gaussian(0, 9)])), [math.sqrt(3)])


# --- feasibility ------------------------------------------------------------


def test_feasibility_examples():
    assert check_feasibility(SCALAR).all
    assert check_feasibility(MomentSpec([0.1], [[0.2]], [-0.5], [1.25])).all is False
    f = check_feasibility(MomentSpec([0], [[0.2]], [-0.5], [1.3]))
    assert f.margin[0] == pytest.approx(1.3 - 1.25, rel=1e-12)
    assert check_feasibility(M.independent_joint([M.gaussian(0, 4)])).all
    loose = MomentSpec([0], [[1]], [0], [0.5])
    assert check_feasibility(loose).all
    assert kurtosis_matching_u(loose)[0] == pytest.approx(math.sqrt(2) / 2, rel=1e-15)


def _root_exists(s, k, grid=4000):
    """Does u**2 + s u + s**2 = k have a root with u > 0 and u + s > 0? Scanned, not solved."""
    lo = max(0.0, -s)
    hi = lo + math.sqrt(abs(k)) + abs(s) + 1.0
    u = lo + (hi - lo) * np.linspace(1e-9, 1, grid)
    f = u**2 + s * u + s**2 - k
    return bool(np.any(np.sign(f[:-1]) != np.sign(f[1:])) or np.any(f == 0))


def scan_grid(P):
    d = math.sqrt(P)
    S = np.linspace(-3, 3, 100) * d**3 + 1e-7
    K = np.linspace(0.013, 12.017, 100) * d**4
    return S, K, d


@pytest.mark.parametrize("P", [1.0, 0.2, 7.0])
def test_feasibility_agrees_with_scan(P):
    S, K, d = scan_grid(P)
    agree = 0
    for Si in S:
        for Ki in K:
            spec = MomentSpec([0.0], [[P]], [Si], [Ki])
            predicted = check_feasibility(spec).all
            assert predicted == _root_exists(Si / d**3, Ki / d**4), (Si, Ki)
            agree += 1
    assert agree == 10**4


def test_match_kurtosis_infeasible():
    with pytest.raises(FeasibilityError) as exc:
        generate(MomentSpec([0, 0], np.eye(2), [2, 0], [1, 3]))
    assert exc.value.margins[0] < 0 < exc.value.margins[1]


def test_default_mode_falls_back_per_element():
    spec = MomentSpec([0, 0], np.eye(2), [2, 0], [1, 3])
    s = generate(spec, "default")
    assert s.u[0] == 1.0 and s.v[0] == 3.0
    assert s.u[1] == pytest.approx(math.sqrt(3))
    m, P, S, K = stats_of(s)
    np.testing.assert_allclose(S, [2, 0], atol=1e-12)
    assert K[1] == pytest.approx(3)
    spec = MomentSpec([0], [[1]], [-2], [1])
    s = generate(spec, "default")
    assert s.u[0] == 3.0 and s.v[0] == 1.0


def test_explicit_u():
    s = generate(SCALAR, [6.0])
    assert s.v[0] == pytest.approx(6.0 - 0.5 / 0.2**1.5)
    with pytest.raises(InfeasibleVError):
        generate(SCALAR, [1.0])
    with pytest.raises(ParameterDomainError):
        generate(SCALAR, [-1.0])
    with pytest.raises(ParameterDomainError):
        generate(SCALAR, "largest")


def test_non_spd_covariance():
    with pytest.raises(FactorizationError):
        generate(MomentSpec([0, 0], [[1, 2], [2, 1]], [0, 0], [3, 3]))


def test_non_diagonal_skew_warns():
    spec = MomentSpec([0, 0], [[2, 1], [1, 2]], [0.1, 0], [12, 12])
    with pytest.warns(ReducedAccuracyWarning):
        generate(spec)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        generate(MomentSpec([0, 0], [[2, 1], [1, 2]], [0, 0], [12, 12]))


# --- constraint examples ----------------------------------------------------


def test_constraint_inactive_returns_base():
    base = generate(PAIR)
    assert constrain(PAIR, base, BoxConstraint.lower_only([-5, -5])) is base


def test_constrain_single_poisson():
    spec = M.independent_joint([M.poisson(1.5)])
    s = generate_constrained(spec, BoxConstraint.lower_only([0.0], theta=0.5))
    assert s.points[0, 1] == pytest.approx(0.75, abs=1e-14)
    m, P, S, _ = stats_of(s)
    assert m[0] == pytest.approx(1.5, abs=1e-12)
    assert P[0, 0] == pytest.approx(1.5, abs=1e-12)
    assert S[0] == pytest.approx(1.5, abs=1e-12)


def test_upper_and_both_sides():
    spec = M.independent_joint([M.poisson(1.5), M.poisson(1)])
    s = generate_constrained(spec, BoxConstraint([0, 0], [3, 2], 0.9))
    inner = s.points[:, 1:]
    assert np.all(inner >= 0) and np.all(inner[0] <= 3) and np.all(inner[1] <= 2)
    m, P, _, _ = stats_of(s)
    np.testing.assert_allclose(m, spec.mean, atol=1e-12)
    np.testing.assert_allclose(P, spec.covariance, atol=1e-12)
    s = generate_constrained(spec, BoxConstraint.upper_only([3.0, 10.0]))
    assert s.v[0] == pytest.approx(0.9 * 1.5 / math.sqrt(1.5))


def test_constraint_errors():
    with pytest.raises(ParameterDomainError):
        BoxConstraint.lower_only([0.0], theta=1.0)
    with pytest.raises(AssumptionViolationError):
        generate_constrained(PAIR, BoxConstraint.lower_only([2.0, 0.0]))
    # pulling u in under strong negative skew leaves v = u + s negative
    spec = MomentSpec([1.0], [[1.0]], [-1.5], [4.0])
    with pytest.raises(InfeasibleVError):
        generate_constrained(spec, BoxConstraint.lower_only([0.0]))


# --- JSON -------------------------------------------------------------------


def test_sigma_json_roundtrip():
    s = generate(PAIR)
    t = SigmaPointSet.from_json(s.to_json())
    for name in ("points", "weights", "u", "v"):
        np.testing.assert_array_equal(getattr(t, name), getattr(s, name))


# --- properties -------------------------------------------------------------

seeds = st.integers(0, 2**32 - 1)
dims = st.integers(1, 20)


@given(seeds, dims)
def test_moment_claims_diagonal(seed, n):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, n)
    s = generate(spec)
    m, P, S, K = stats_of(s)
    scale = np.sqrt(np.diag(spec.covariance))
    np.testing.assert_allclose(m, spec.mean, rtol=1e-10, atol=1e-10 * scale.max())
    np.testing.assert_allclose(P, spec.covariance, rtol=1e-10, atol=1e-10 * scale.max() ** 2)
    assert np.all(np.abs(S - spec.skew_diag) <= 1e-10 * (np.abs(spec.skew_diag) + scale**3))
    np.testing.assert_allclose(K, spec.kurt_diag, rtol=1e-10)
    assert abs(s.weights.sum() - 1) <= 1e-14 * max(1, np.abs(s.weights).sum())
    assert np.all(s.u > 0) and np.all(s.v > 0) and np.all(s.weights[1:] > 0)
    np.testing.assert_array_equal(s.points[:, 0], spec.mean)


@given(seeds, dims)
def test_mean_and_covariance_general(seed, n):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, n, diagonal=False)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ReducedAccuracyWarning)
        s = generate(spec, "default")
    m, P, _, _ = stats_of(s)
    norm = np.abs(spec.covariance).max()
    np.testing.assert_allclose(m, spec.mean, atol=1e-10 * math.sqrt(norm) * max(1, np.abs(spec.mean).max()))
    np.testing.assert_allclose(P, spec.covariance, atol=1e-10 * norm)


@given(seeds, dims, st.floats(0.05, 0.95), st.booleans())
def test_constrained_claims(seed, n, theta, nonnegative_skew):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, n)
    if nonnegative_skew:
        spec = MomentSpec(spec.mean, spec.covariance, np.abs(spec.skew_diag), spec.kurt_diag)
    base = generate(spec)
    sd = np.sqrt(np.diag(spec.covariance))
    lower = spec.mean - rng.uniform(0.2, 3, n) * sd
    try:
        s = constrain(spec, base, BoxConstraint.lower_only(lower, theta))
    except InfeasibleVError:
        # only negative skew can push v below zero after u is pulled in
        assert not nonnegative_skew
        assume(False)
    m, P, S, _ = stats_of(s)
    np.testing.assert_allclose(m, spec.mean, atol=1e-10 * max(1, np.abs(spec.mean).max()))
    np.testing.assert_allclose(P, spec.covariance, rtol=1e-10, atol=1e-10 * sd.max() ** 2)
    assert np.all(s.points[:, 1:] >= lower[:, None])
    only_u = np.isclose(s.v, s.u + spec.skew_diag / sd**3, rtol=1e-13)
    err = np.abs(S - spec.skew_diag)[only_u]
    assert np.all(err <= 1e-10 * (np.abs(spec.skew_diag) + sd**3)[only_u])


@given(seeds, dims)
def test_zero_skew_is_symmetric(seed, n):
    rng = np.random.default_rng(seed)
    spec = random_spec(rng, n)
    spec = MomentSpec(spec.mean, spec.covariance, np.zeros(n), spec.kurt_diag)
    s = generate(spec)
    np.testing.assert_array_equal(s.u, s.v)
    np.testing.assert_array_equal(s.weights[1 : n + 1], s.weights[n + 1 :])


def gaussian_spec(rng, n):
    mu = rng.normal(0, 2, n)
    var = rng.uniform(0.1, 5, n)
    return M.independent_joint([M.gaussian(a, b) for a, b in zip(mu, var)])


@given(seeds, st.integers(1, 12))
def test_gaussian_reduction(seed, n):
    spec = gaussian_spec(np.random.default_rng(seed), n)
    g = generate(spec)
    u = ut_sigma_points(spec.mean, spec.covariance, kappa=3 - n)
    # the baseline lists the + side first
    np.testing.assert_allclose(g.points[:, 1 : n + 1], u.points[:, n + 1 :], rtol=0, atol=1e-13 * 10)
    np.testing.assert_allclose(g.points[:, n + 1 :], u.points[:, 1 : n + 1], rtol=0, atol=1e-13 * 10)
    np.testing.assert_allclose(g.weights, u.weights, rtol=0, atol=1e-13)
