"""Closed-form central moments of the supported univariate distributions.

Skewness and kurtosis here are the *unnormalized* third and fourth central
moments, ``E[(x - mean)^3]`` and ``E[(x - mean)^4]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import DegenerateVarianceError, ParameterDomainError, ShapeMismatchError

# kind -> ordered parameter names, as used in the JSON form
PARAMETERS: dict[str, tuple[str, ...]] = {
    "gaussian": ("mu", "var"),
    "exponential": ("lambda",),
    "gamma": ("a", "b"),
    "weibull": ("a", "b"),
    "rayleigh": ("sigma",),
    "beta": ("a", "b"),
    "binomial": ("n", "p"),
    "poisson": ("lambda",),
    "geometric": ("p",),
    "negative_binomial": ("r", "p"),
}

# short labels in the style of the published tables, e.g. "P(0.1)"
_LABELS = {
    "gaussian": "N",
    "exponential": "E",
    "gamma": "G",
    "weibull": "W",
    "rayleigh": "R",
    "beta": "BE",
    "binomial": "B",
    "poisson": "P",
    "geometric": "GE",
    "negative_binomial": "NB",
}

DISCRETE = frozenset({"binomial", "poisson", "geometric", "negative_binomial"})


def _positive(name, value):
    if not value > 0 or not math.isfinite(value):
        raise ParameterDomainError(name, value, "> 0")


def _validate(kind, params):
    if kind == "gaussian":
        if not math.isfinite(params["mu"]):
            raise ParameterDomainError("mu", params["mu"], "finite")
        _positive("var", params["var"])
    elif kind in ("exponential", "poisson"):
        _positive("lambda", params["lambda"])
    elif kind in ("gamma", "weibull", "beta"):
        _positive("a", params["a"])
        _positive("b", params["b"])
    elif kind == "rayleigh":
        _positive("sigma", params["sigma"])
    elif kind == "binomial":
        n = params["n"]
        if n != int(n) or n < 1:
            raise ParameterDomainError("n", n, "integer >= 1")
        if not 0.0 <= params["p"] <= 1.0:
            raise ParameterDomainError("p", params["p"], "0 <= p <= 1")
    elif kind == "geometric":
        if not 0.0 < params["p"] <= 1.0:
            raise ParameterDomainError("p", params["p"], "0 < p <= 1")
    elif kind == "negative_binomial":
        _positive("r", params["r"])
        if not 0.0 < params["p"] < 1.0:
            raise ParameterDomainError("p", params["p"], "0 < p < 1")


@dataclass(frozen=True)
class DistributionSpec:
    """One named distribution with its parameters.

    Parameter conventions: ``gamma(a, b)`` has shape ``a`` and scale ``b``;
    ``weibull(a, b)`` has scale ``a`` and shape ``b``; ``geometric(p)`` and
    ``negative_binomial(r, p)`` count failures, so their support starts at 0.
    """

    kind: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in PARAMETERS:
            raise ParameterDomainError("kind", self.kind, f"one of {sorted(PARAMETERS)}")
        names = PARAMETERS[self.kind]
        missing = [p for p in names if p not in self.params]
        extra = [p for p in self.params if p not in names]
        if missing or extra:
            raise ParameterDomainError(
                "params", dict(self.params), f"exactly the fields {list(names)} for {self.kind}"
            )
        clean = {}
        for name in names:
            value = self.params[name]
            if isinstance(value, bool) or not isinstance(value, (int, float, np.integer, np.floating)):
                raise ParameterDomainError(name, value, "a real number")
            clean[name] = int(value) if name == "n" and float(value).is_integer() else float(value)
        _validate(self.kind, clean)
        object.__setattr__(self, "params", clean)

    def __getitem__(self, name):
        return self.params[name]

    @property
    def label(self) -> str:
        args = ",".join(f"{self.params[p]:g}" for p in PARAMETERS[self.kind])
        return f"{_LABELS[self.kind]}({args})"

    @property
    def is_discrete(self) -> bool:
        return self.kind in DISCRETE

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.kind, **self.params}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "DistributionSpec":
        data = dict(data)
        try:
            kind = str(data.pop("kind")).lower().replace("-", "_")
        except KeyError:
            raise ParameterDomainError("kind", None, "present in the JSON object") from None
        return cls(kind, data)


def gaussian(mu, var):
    return DistributionSpec("gaussian", {"mu": mu, "var": var})


def exponential(lam):
    return DistributionSpec("exponential", {"lambda": lam})


def gamma(a, b):
    return DistributionSpec("gamma", {"a": a, "b": b})


def weibull(a, b):
    return DistributionSpec("weibull", {"a": a, "b": b})


def rayleigh(sigma):
    return DistributionSpec("rayleigh", {"sigma": sigma})


def beta(a, b):
    return DistributionSpec("beta", {"a": a, "b": b})


def binomial(n, p):
    return DistributionSpec("binomial", {"n": n, "p": p})


def poisson(lam):
    return DistributionSpec("poisson", {"lambda": lam})


def geometric(p):
    return DistributionSpec("geometric", {"p": p})


def negative_binomial(r, p):
    return DistributionSpec("negative_binomial", {"r": r, "p": p})


@dataclass(frozen=True)
class UnivariateMoments:
    mean: float
    variance: float
    skewness: float
    kurtosis: float

    def raw(self) -> tuple[float, float, float, float]:
        """Raw moments ``E[x^k]`` for k = 1..4."""
        m, p, s, k = self.mean, self.variance, self.skewness, self.kurtosis
        return (
            m,
            p + m**2,
            s + 3 * m * p + m**3,
            k + 4 * m * s + 6 * m**2 * p + m**4,
        )


def moments_of(d: DistributionSpec) -> UnivariateMoments:
    """Mean, variance, third and fourth central moments of ``d``."""
    k, q = d.kind, d.params
    if k == "gaussian":
        var = q["var"]
        return UnivariateMoments(q["mu"], var, 0.0, 3.0 * var**2)
    if k == "exponential":
        lam = q["lambda"]
        return UnivariateMoments(1 / lam, 1 / lam**2, 2 / lam**3, 9 / lam**4)
    if k == "gamma":
        a, b = q["a"], q["b"]
        return UnivariateMoments(a * b, a * b**2, 2 * a * b**3, 3 * a * b**4 * (a + 2))
    if k == "weibull":
        a, b = q["a"], q["b"]
        g1, g2, g3, g4 = (math.gamma(j / b + 1) for j in (1, 2, 3, 4))
        return UnivariateMoments(
            a * g1,
            a**2 * (g2 - g1**2),
            a**3 * (g3 + 2 * g1**3 - 3 * g1 * g2),
            a**4 * (g4 - 3 * g1**4 - 4 * g1 * g3 + 6 * g1**2 * g2),
        )
    if k == "rayleigh":
        s = q["sigma"]
        return UnivariateMoments(
            s * math.sqrt(math.pi / 2),
            s**2 * (2 - math.pi / 2),
            s**3 * (math.pi - 3) * math.sqrt(math.pi / 2),
            s**4 * (32 - 3 * math.pi**2) / 4,
        )
    if k == "beta":
        a, b = q["a"], q["b"]
        z0, z1, z2, z3 = (a + b + j for j in range(4))
        return UnivariateMoments(
            a / z0,
            a * b / (z0**2 * z1),
            2 * a * b * (b - a) / (z0**3 * z1 * z2),
            3 * a * b * (2 * (b - a) ** 2 + a * b * z2) / (z0**4 * z1 * z2 * z3),
        )
    if k == "binomial":
        n, p = q["n"], q["p"]
        return UnivariateMoments(
            n * p,
            n * p * (1 - p),
            n * p * (1 - p) * (1 - 2 * p),
            n * p * (1 - p) * (1 + p * (1 - p) * (3 * n - 6)),
        )
    if k == "poisson":
        lam = q["lambda"]
        return UnivariateMoments(lam, lam, lam, 3 * lam**2 + lam)
    if k == "geometric":
        p = q["p"]
        return UnivariateMoments(
            (1 - p) / p,
            (1 - p) / p**2,
            (p - 1) * (p - 2) / p**3,
            (1 - p) * (p**2 - 9 * p + 9) / p**4,
        )
    if k == "negative_binomial":
        r, p = q["r"], q["p"]
        return UnivariateMoments(
            r * (1 - p) / p,
            r * (1 - p) / p**2,
            r * (p - 1) * (p - 2) / p**3,
            r * (1 - p) * (p**2 - 6 * p - 3 * p * r + 3 * r + 6) / p**4,
        )
    raise ParameterDomainError("kind", k, f"one of {sorted(PARAMETERS)}")


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class MomentSpec:
    """Mean, covariance and diagonal third/fourth central moments of a random vector."""

    mean: np.ndarray
    covariance: np.ndarray
    skew_diag: np.ndarray
    kurt_diag: np.ndarray

    def __post_init__(self):
        mean = np.atleast_1d(_readonly(self.mean))
        n = mean.shape[0]
        cov = np.array(self.covariance, dtype=float)
        if cov.ndim == 0:
            cov = cov.reshape(1, 1)
        cov = np.atleast_2d(cov)
        cov.setflags(write=False)
        skew = np.atleast_1d(_readonly(self.skew_diag))
        kurt = np.atleast_1d(_readonly(self.kurt_diag))
        if mean.ndim != 1 or cov.shape != (n, n) or skew.shape != (n,) or kurt.shape != (n,):
            raise ShapeMismatchError(
                f"inconsistent shapes: mean {mean.shape}, covariance {cov.shape}, "
                f"skew_diag {skew.shape}, kurt_diag {kurt.shape}"
            )
        for name, arr in (("mean", mean), ("covariance", cov), ("skew_diag", skew), ("kurt_diag", kurt)):
            if not np.all(np.isfinite(arr)):
                raise ParameterDomainError(name, arr.tolist(), "finite entries")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "covariance", cov)
        object.__setattr__(self, "skew_diag", skew)
        object.__setattr__(self, "kurt_diag", kurt)

    @property
    def n(self) -> int:
        return self.mean.shape[0]

    def to_dict(self) -> dict[str, Any]:
        return {
            "mean": self.mean.tolist(),
            "covariance": self.covariance.tolist(),
            "skew_diag": self.skew_diag.tolist(),
            "kurt_diag": self.kurt_diag.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "MomentSpec":
        return cls(data["mean"], data["covariance"], data["skew_diag"], data["kurt_diag"])

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text: str) -> "MomentSpec":
        return cls.from_dict(json.loads(text))


def independent_joint(ds: Sequence[DistributionSpec]) -> MomentSpec:
    """Moment spec of a vector with independent coordinates ``ds[i]``."""
    if len(ds) == 0:
        raise ParameterDomainError("ds", [], "a non-empty list of distributions")
    ms = [moments_of(d) for d in ds]
    for i, (d, m) in enumerate(zip(ds, ms)):
        if not m.variance > 0:
            raise DegenerateVarianceError(
                f"coordinate {i} ({d.label}) has variance {m.variance}; covariance would be singular"
            )
    return MomentSpec(
        [m.mean for m in ms],
        np.diag([m.variance for m in ms]),
        [m.skewness for m in ms],
        [m.kurtosis for m in ms],
    )


def parse_distributions(data: Any) -> list[DistributionSpec]:
    """Accept one JSON distribution object or a list of them."""
    if isinstance(data, str):
        data = json.loads(data)
    if isinstance(data, Mapping):
        data = [data]
    return [DistributionSpec.from_dict(d) for d in data]
