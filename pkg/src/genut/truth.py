"""Reference values for transformed random variables.

``expect`` integrates against the density (continuous) or sums the pmf
until the remaining tail mass is below ``1e-14`` (discrete). The
characteristic-function forms give ``E[sin x]`` and ``E[cos x]`` in closed
form where one exists.
"""

from __future__ import annotations

import functools
import itertools
import math
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, stats

from .moments import DistributionSpec, moments_of

TAIL_MASS = 1e-14

CLOSED_FORM_CF = frozenset(
    {"gaussian", "exponential", "gamma", "binomial", "poisson", "geometric", "negative_binomial"}
)


def scipy_distribution(d: DistributionSpec):
    q = d.params
    return {
        "gaussian": lambda: stats.norm(q["mu"], math.sqrt(q["var"])),
        "exponential": lambda: stats.expon(scale=1 / q["lambda"]),
        "gamma": lambda: stats.gamma(q["a"], scale=q["b"]),
        "weibull": lambda: stats.weibull_min(q["b"], scale=q["a"]),
        "rayleigh": lambda: stats.rayleigh(scale=q["sigma"]),
        "beta": lambda: stats.beta(q["a"], q["b"]),
        "binomial": lambda: stats.binom(q["n"], q["p"]),
        "poisson": lambda: stats.poisson(q["lambda"]),
        "geometric": lambda: stats.geom(q["p"], loc=-1),
        "negative_binomial": lambda: stats.nbinom(q["r"], q["p"]),
    }[d.kind]()


def support_grid(d: DistributionSpec, tail=TAIL_MASS) -> tuple[np.ndarray, np.ndarray]:
    """Support points and pmf of a discrete ``d``, truncated at tail mass ``tail``."""
    dist = scipy_distribution(d)
    hi = int(dist.isf(tail)) + 1 if d.kind != "binomial" else d.params["n"]
    k = np.arange(0, hi + 1)
    return k.astype(float), dist.pmf(k)


def expect(d: DistributionSpec, g: Callable[[np.ndarray], np.ndarray]) -> float:
    """``E[g(x)]`` by series summation or adaptive quadrature."""
    if d.is_discrete:
        k, p = support_grid(d)
        return float(np.sum(p * g(k)))
    dist = scipy_distribution(d)
    lo, hi = dist.support()
    if not np.isfinite(lo):
        lo = dist.ppf(1e-17) if d.kind != "gaussian" else d.params["mu"] - 40 * math.sqrt(d.params["var"])
    if not np.isfinite(hi):
        hi = dist.isf(1e-17) if d.kind != "gaussian" else d.params["mu"] + 40 * math.sqrt(d.params["var"])
    val, _ = integrate.quad(lambda x: g(x) * dist.pdf(x), lo, hi, limit=500, epsabs=1e-14, epsrel=1e-13)
    return float(val)


def characteristic_function(d: DistributionSpec, t: float) -> complex:
    """``E[exp(i t x)]`` for distributions with an elementary closed form."""
    q = d.params
    k = d.kind
    it = 1j * t
    if k == "gaussian":
        return complex(np.exp(it * q["mu"] - 0.5 * q["var"] * t**2))
    if k == "exponential":
        return q["lambda"] / (q["lambda"] - it)
    if k == "gamma":
        return (1 - it * q["b"]) ** (-q["a"])
    if k == "binomial":
        return (1 - q["p"] + q["p"] * np.exp(it)) ** q["n"]
    if k == "poisson":
        return complex(np.exp(q["lambda"] * (np.exp(it) - 1)))
    if k == "geometric":
        p = q["p"]
        return p / (1 - (1 - p) * np.exp(it))
    if k == "negative_binomial":
        p = q["p"]
        return (p / (1 - (1 - p) * np.exp(it))) ** q["r"]
    raise ValueError(f"no closed-form characteristic function for {k}")


def sin_truth(d: DistributionSpec) -> tuple[float, float, str]:
    """Mean and variance of ``sin(x)`` and the method used."""
    if d.kind in CLOSED_FORM_CF:
        phi1 = characteristic_function(d, 1.0)
        phi2 = characteristic_function(d, 2.0)
        mean = phi1.imag
        second = 0.5 * (1.0 - phi2.real)
        source = "characteristic-function"
    else:
        mean = expect(d, np.sin)
        second = expect(d, lambda x: np.sin(x) ** 2)
        source = "quadrature"
    return mean, second - mean**2, source


def quadratic_truth(d: DistributionSpec, alpha=3.0, beta=2.0) -> tuple[float, float]:
    """Mean and variance of ``alpha x + beta x**2`` from raw moments up to order four."""
    m1, m2, m3, m4 = moments_of(d).raw()
    mean = alpha * m1 + beta * m2
    second = alpha**2 * m2 + 2 * alpha * beta * m3 + beta**2 * m4
    return mean, second - mean**2


def central_moment(d: DistributionSpec, g, order: int, center: float) -> float:
    return expect(d, lambda x: (g(x) - center) ** order)


def expect_independent_discrete(
    ds: Sequence[DistributionSpec], f: Callable[[np.ndarray], np.ndarray]
) -> tuple[np.ndarray, np.ndarray]:
    """Mean and covariance of ``f(x)`` by enumerating the joint pmf of independent discrete coordinates."""
    grids = [support_grid(d) for d in ds]
    pts = np.array(list(itertools.product(*(g[0] for g in grids)))).T
    w = functools.reduce(np.multiply.outer, [g[1] for g in grids]).ravel()
    y = np.atleast_2d(np.asarray(f(pts), dtype=float))
    mean = y @ w
    dev = y - mean[:, None]
    cov = (dev * w) @ dev.T
    return mean, 0.5 * (cov + cov.T)
