"""Push sigma points through a transform and summarize the result."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Optional

import numpy as np

from .errors import EvaluationError, ParameterDomainError, ShapeMismatchError
from .sigma import SigmaPointSet

log = logging.getLogger(__name__)

EIGENVALUE_FLOOR = -1e-10

# A transform maps an (n,) vector to an (m,) vector (or scalar). Registry
# transforms also accept an (n, k) array of column points and return (m, k).
TransformFn = Callable[[np.ndarray], Any]


@dataclass(frozen=True, eq=False)
class TransformResult:
    mean: np.ndarray
    covariance: np.ndarray
    skew_diag: np.ndarray
    kurt_diag: np.ndarray
    transformed_points: Optional[np.ndarray] = None
    min_eigenvalue: float = math.nan

    def to_dict(self) -> dict[str, Any]:
        out = {
            "mean": self.mean.tolist(),
            "covariance": self.covariance.tolist(),
            "skew_diag": self.skew_diag.tolist(),
            "kurt_diag": self.kurt_diag.tolist(),
            "min_eigenvalue": self.min_eigenvalue,
        }
        if self.transformed_points is not None:
            out["transformed_points"] = self.transformed_points.tolist()
        return out

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def _column(y):
    return np.atleast_1d(np.asarray(y, dtype=float)).reshape(-1)


def transform_points(s: SigmaPointSet, f: TransformFn) -> np.ndarray:
    """Evaluate ``f`` at each sigma point; column ``i`` is ``f(points[:, i])``."""
    cols = []
    for i in range(s.points.shape[1]):
        y = _column(f(s.points[:, i].copy()))
        if not np.all(np.isfinite(y)):
            raise EvaluationError(i, y.tolist())
        if cols and y.shape != cols[0].shape:
            raise ShapeMismatchError(f"point {i} gave output shape {y.shape}, expected {cols[0].shape}")
        cols.append(y)
    return np.column_stack(cols)


def _check(points, weights):
    points = np.atleast_2d(np.asarray(points, dtype=float))
    weights = np.asarray(weights, dtype=float)
    if weights.ndim != 1 or points.shape[1] != weights.shape[0]:
        raise ShapeMismatchError(f"{points.shape[1]} points but {weights.shape} weights")
    return points, weights


def sample_mean(points, weights) -> np.ndarray:
    points, weights = _check(points, weights)
    return points @ weights


def _centered(points, weights, mean):
    points, weights = _check(points, weights)
    mean = np.asarray(mean, dtype=float).reshape(-1)
    if mean.shape[0] != points.shape[0]:
        raise ShapeMismatchError(f"mean has length {mean.shape[0]}, points have {points.shape[0]} rows")
    return points - mean[:, None], weights


def sample_covariance(points, weights, mean) -> np.ndarray:
    """Weighted outer-product covariance, symmetrized."""
    d, w = _centered(points, weights, mean)
    c = (d * w) @ d.T
    return 0.5 * (c + c.T)


def sample_skew_diag(points, weights, mean) -> np.ndarray:
    d, w = _centered(points, weights, mean)
    return d**3 @ w


def sample_kurt_diag(points, weights, mean) -> np.ndarray:
    d, w = _centered(points, weights, mean)
    return d**4 @ w


def _min_eigenvalue(c):
    lo = float(np.linalg.eigvalsh(c)[0])
    if lo < EIGENVALUE_FLOOR:
        log.warning("sample covariance is indefinite: smallest eigenvalue %.3e", lo)
    return lo


def summarize(points, weights) -> TransformResult:
    mean = sample_mean(points, weights)
    cov = sample_covariance(points, weights, mean)
    return TransformResult(
        mean=mean,
        covariance=cov,
        skew_diag=sample_skew_diag(points, weights, mean),
        kurt_diag=sample_kurt_diag(points, weights, mean),
        transformed_points=np.atleast_2d(np.asarray(points, dtype=float)),
        min_eigenvalue=_min_eigenvalue(cov),
    )


def propagate(s: SigmaPointSet, f: TransformFn) -> TransformResult:
    """Sample statistics of ``f(x)`` under the sigma-point approximation of ``x``."""
    return summarize(transform_points(s, f), s.weights)


# --- named transforms for the command line ---------------------------------


def identity():
    return lambda x: np.asarray(x, dtype=float)


def quadratic(alpha=3.0, beta=2.0):
    """Element-wise ``alpha x + beta x**2``."""
    return lambda x: alpha * np.asarray(x, dtype=float) + beta * np.asarray(x, dtype=float) ** 2


def sine():
    return lambda x: np.sin(np.asarray(x, dtype=float))


def cosine():
    return lambda x: np.cos(np.asarray(x, dtype=float))


def sincos_product():
    """``[sin(x1 x2), cos(x1 x2)]`` for a two-dimensional input."""

    def f(x):
        x = np.asarray(x, dtype=float)
        t = x[0] * x[1]
        return np.stack([np.sin(t), np.cos(t)])

    return f


def sir(I=10.0, R=2.0, beta=1.5, gamma=0.3, N=100.0):
    from .bench import SIRState, sir_map

    state = SIRState(I=I, R=R, beta=beta, gamma=gamma, N=N)
    return lambda x: sir_map(x, state)


TRANSFORMS: dict[str, Callable[..., TransformFn]] = {
    "identity": identity,
    "quadratic": quadratic,
    "sin": sine,
    "cos": cosine,
    "sincos": sincos_product,
    "sir": sir,
}


def make_transform(name: str, params: Optional[Mapping[str, float]] = None) -> TransformFn:
    try:
        factory = TRANSFORMS[name]
    except KeyError:
        raise ParameterDomainError("fn", name, f"one of {sorted(TRANSFORMS)}") from None
    try:
        return factory(**dict(params or {}))
    except TypeError as exc:
        raise ParameterDomainError("fn-params", dict(params or {}), f"valid arguments for {name}: {exc}") from None
