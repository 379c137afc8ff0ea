"""Generalized unscented transform sigma points.

The 2n+1 points are ``x_0 = mean``, ``x_i = mean - u_i L[:, i]`` and
``x_{i+n} = mean + v_i L[:, i]`` for a square root ``L`` of the covariance.
Weights follow from matching the mean, covariance and diagonal skewness:

    v   = u + s,          s  = S / d**3
    w'' = 1 / (v (u + v)),  w' = w'' v / u,  w_0 = 1 - sum(w' + w'')

where ``d`` is the diagonal of ``L``. Choosing ``u`` as the positive root of
``u**2 + s u + s**2 = K / d**4`` also matches the diagonal kurtosis.

For a non-diagonal covariance the skewness and kurtosis terms are scaled by
``diag(L)`` only, so the third and fourth diagonal moments are matched
exactly just when ``L`` is diagonal. Mean and covariance are exact for any
SPD covariance.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from typing import Any, Mapping, Union

import numpy as np

from .errors import (
    AssumptionViolationError,
    ConstraintError,
    FeasibilityError,
    InfeasibleVError,
    ParameterDomainError,
    ShapeMismatchError,
)
from .linalg import hadamard_div, hadamard_pow, matrix_sqrt
from .moments import MomentSpec

DEFAULT_THETA = 0.9


class ReducedAccuracyWarning(UserWarning):
    """Diagonal skewness/kurtosis cannot be matched exactly for this covariance."""


def _frozen(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SigmaPointSet:
    """Weighted sigma points; ``points[:, i]`` is point ``i``.

    ``w_0`` may be negative, so the weights form a signed measure.
    """

    points: np.ndarray
    weights: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        pts = _frozen(self.points)
        if pts.ndim == 1:
            pts = _frozen(pts.reshape(1, -1))
        n = pts.shape[0]
        w, u, v = _frozen(self.weights), _frozen(self.u), _frozen(self.v)
        if pts.shape != (n, 2 * n + 1) or w.shape != (2 * n + 1,) or u.shape != (n,) or v.shape != (n,):
            raise ShapeMismatchError(
                f"points {pts.shape}, weights {w.shape}, u {u.shape}, v {v.shape} "
                "do not describe 2n+1 points in n dimensions"
            )
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def mean(self) -> np.ndarray:
        return self.points[:, 0]

    def factor_columns(self) -> np.ndarray:
        """Recover the square-root columns: ``x_{i+n} - x_i = (u_i + v_i) L[:, i]``."""
        n = self.n
        return (self.points[:, n + 1 :] - self.points[:, 1 : n + 1]) / (self.u + self.v)

    def to_dict(self) -> dict[str, Any]:
        return {
            "points": self.points.tolist(),
            "weights": self.weights.tolist(),
            "u": self.u.tolist(),
            "v": self.v.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "SigmaPointSet":
        return cls(data["points"], data["weights"], data["u"], data["v"])

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "SigmaPointSet":
        return cls.from_dict(json.loads(text))


@dataclass(frozen=True, eq=False)
class BoxConstraint:
    """Bounds ``lower < x < upper``; infinite entries leave a side open."""

    lower: np.ndarray
    upper: np.ndarray
    theta: float = DEFAULT_THETA

    def __post_init__(self):
        lo, hi = np.atleast_1d(_frozen(self.lower)), np.atleast_1d(_frozen(self.upper))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise ShapeMismatchError(f"bounds have shapes {lo.shape} and {hi.shape}")
        if not 0.0 < self.theta < 1.0:
            raise ParameterDomainError("theta", self.theta, "0 < theta < 1")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def lower_only(cls, lower, theta=DEFAULT_THETA):
        lo = np.atleast_1d(np.asarray(lower, dtype=float))
        return cls(lo, np.full_like(lo, np.inf), theta)

    @classmethod
    def upper_only(cls, upper, theta=DEFAULT_THETA):
        hi = np.atleast_1d(np.asarray(upper, dtype=float))
        return cls(np.full_like(hi, -np.inf), hi, theta)


@dataclass(frozen=True)
class Feasibility:
    feasible: np.ndarray
    margin: np.ndarray

    @property
    def all(self) -> bool:
        return bool(np.all(self.feasible))


def _standardized(spec, L):
    d = np.diag(L)
    s = hadamard_pow(d, -3) * spec.skew_diag
    k = hadamard_pow(d, -4) * spec.kurt_diag
    return s, k


def check_feasibility(spec: MomentSpec, sqrt_method="cholesky") -> Feasibility:
    """Whether kurtosis matching yields ``u > 0`` and ``v > 0`` per coordinate.

    Coordinate ``i`` is feasible iff ``K_i > d_i**4 * (S_i / d_i**3)**2``;
    ``margin`` is the left side minus the right side.
    """
    L = matrix_sqrt(spec.covariance, sqrt_method)
    d = np.diag(L)
    s = hadamard_pow(d, -3) * spec.skew_diag
    margin = spec.kurt_diag - hadamard_pow(d, 4) * s**2
    return Feasibility(margin > 0, margin)


def _kurtosis_u(s, k):
    return 0.5 * (-s + np.sqrt(4 * k - 3 * s**2))


def kurtosis_matching_u(spec: MomentSpec, sqrt_method="cholesky") -> np.ndarray:
    """Free parameter ``u`` that matches the diagonal kurtosis."""
    feas = check_feasibility(spec, sqrt_method)
    if not feas.all:
        raise FeasibilityError(feas.margin)
    s, k = _standardized(spec, matrix_sqrt(spec.covariance, sqrt_method))
    return _kurtosis_u(s, k)


def _weights(u, v):
    w2 = hadamard_div(hadamard_div(np.ones_like(u), v), u + v)
    w1 = hadamard_div(w2 * v, u)
    w0 = 1.0 - (np.sum(w1) + np.sum(w2))
    return np.concatenate(([w0], w1, w2))


def _points(mean, L, u, v):
    return np.column_stack([mean, mean[:, None] - L * u, mean[:, None] + L * v])


def _assemble(mean, L, u, v):
    if np.any(~(v > 0)):
        raise InfeasibleVError(v)
    return SigmaPointSet(_points(mean, L, u, v), _weights(u, v), u, v)


def _is_diagonal(L):
    return np.count_nonzero(L - np.diag(np.diag(L))) == 0


USpec = Union[str, np.ndarray, list, tuple, float]


def generate(spec: MomentSpec, u: USpec = "match-kurtosis", sqrt_method="cholesky") -> SigmaPointSet:
    """Sigma points matching mean, covariance and diagonal skewness of ``spec``.

    Parameters
    ----------
    spec : MomentSpec
    u : {"match-kurtosis", "default"} or array_like
        ``"match-kurtosis"`` also matches the diagonal kurtosis and raises
        :class:`FeasibilityError` if any coordinate cannot be matched.
        ``"default"`` matches kurtosis where feasible and elsewhere uses
        ``u_i = max(0, -s_i) + 1``, which keeps ``v_i >= 1``.
        An explicit positive vector is used as given.
    sqrt_method : {"cholesky", "symmetric"}
    """
    L = matrix_sqrt(spec.covariance, sqrt_method)
    s, k = _standardized(spec, L)
    if not _is_diagonal(L) and np.any(spec.skew_diag != 0):
        warnings.warn(
            "non-diagonal covariance: diagonal skewness/kurtosis are scaled by diag(L) "
            "and will not be matched exactly",
            ReducedAccuracyWarning,
            stacklevel=2,
        )
    if isinstance(u, str):
        if u == "match-kurtosis":
            u_vec = kurtosis_matching_u(spec, sqrt_method)
        elif u == "default":
            feasible = spec.kurt_diag - np.diag(L) ** 4 * s**2 > 0
            fallback = np.maximum(0.0, -s) + 1.0
            with np.errstate(invalid="ignore"):
                u_vec = np.where(feasible, _kurtosis_u(s, k), fallback)
        else:
            raise ParameterDomainError("u", u, "'match-kurtosis', 'default' or a positive vector")
    else:
        u_vec = np.broadcast_to(np.asarray(u, dtype=float), (spec.n,)).copy()
        if np.any(~(u_vec > 0)):
            raise ParameterDomainError("u", u_vec.tolist(), "> 0 element-wise")
    return _assemble(spec.mean, L, u_vec, u_vec + s)


def _repair(mean, col, bound, theta):
    """``theta * min |(mean - bound) / col|`` over coordinates with a finite bound and nonzero column."""
    num = mean - bound
    ok = (col != 0) & np.isfinite(num)
    if not np.any(ok):
        return None
    return theta * float(np.min(np.abs(num[ok] / col[ok])))


def _violations(pts, bound, below):
    inner = pts[:, 1:]
    bad = inner < bound[:, None] if below else inner > bound[:, None]
    return np.flatnonzero(np.any(bad, axis=0)) + 1


def constrain(spec: MomentSpec, base: SigmaPointSet, c: BoxConstraint) -> SigmaPointSet:
    """Move sigma points strictly inside ``c.lower < x < c.upper``.

    A violating point ``x_i`` (i <= n) gets ``u_i`` reset to ``theta`` times
    the distance, in units of the square-root column, from the mean to the
    nearest bound; points ``x_{i+n}`` get ``v_i`` reset the same way. Lower
    bounds are repaired first, then upper bounds. A ``v_i`` that was not
    reset is recomputed from a changed ``u_i`` so the diagonal skewness is
    kept; weights are always recomputed.

    Mean and covariance stay exact. Diagonal kurtosis is lost wherever a
    parameter was reset, and diagonal skewness wherever a ``v_i`` was reset.
    """
    n = spec.n
    if c.lower.shape != (n,):
        raise ShapeMismatchError(f"constraint has dimension {c.lower.shape[0]}, spec has {n}")
    mean = spec.mean
    if not (np.all(c.lower < mean) and np.all(mean < c.upper)):
        raise AssumptionViolationError(
            f"mean {mean.tolist()} is not strictly inside ({c.lower.tolist()}, {c.upper.tolist()})"
        )
    if not (_violations(base.points, c.lower, True).size or _violations(base.points, c.upper, False).size):
        return base

    L = base.factor_columns()
    s = hadamard_pow(np.diag(L), -3) * spec.skew_diag
    u, v = base.u.copy(), base.v.copy()
    u_reset = np.zeros(n, dtype=bool)
    v_reset = np.zeros(n, dtype=bool)
    pts = base.points
    for bound, below in ((c.lower, True), (c.upper, False)):
        for i in _violations(pts, bound, below):
            j = (i - 1) % n
            new = _repair(mean, L[:, j], bound, c.theta)
            if new is None:
                continue
            if i <= n:
                u[j] = new
                u_reset[j] = True
            else:
                v[j] = new
                v_reset[j] = True
        v = np.where(u_reset & ~v_reset, u + s, v)
        if np.any(~(v > 0)):
            raise InfeasibleVError(v)
        pts = _points(mean, L, u, v)

    out = SigmaPointSet(pts, _weights(u, v), u, v)
    inner = out.points[:, 1:]
    if np.any(inner < c.lower[:, None]) or np.any(inner > c.upper[:, None]):
        raise ConstraintError(
            "repaired sigma points still violate the bounds; the box is too tight "
            "for the square-root columns of this covariance"
        )
    return out


def generate_constrained(
    spec: MomentSpec,
    c: BoxConstraint,
    u: USpec = "match-kurtosis",
) -> SigmaPointSet:
    return constrain(spec, generate(spec, u), c)
