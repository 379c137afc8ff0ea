"""Seeded Monte Carlo sampling and empirical truths.

Every draw comes from a ``numpy.random.Generator`` over ``PCG64DXSM``. The
stream for job ``stream``, coordinate ``j`` and chunk ``c`` is seeded by
``SeedSequence(seed, spawn_key=(stream, j, c))``, so results depend only on
``(seed, stream, N, distributions)`` and not on how chunks are scheduled.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from .errors import ParameterDomainError, ShapeMismatchError
from .moments import DistributionSpec
from .propagation import TransformFn, TransformResult

GENERATOR_ID = "numpy.random.Generator(PCG64DXSM)"
CHUNK = 1 << 20
DEFAULT_N = 10**5
DEFAULT_TRUTH_N = 10**7


def generator(seed: int, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64DXSM(np.random.SeedSequence(seed, spawn_key=key)))


def draw(d: DistributionSpec, size: int, rng: np.random.Generator) -> np.ndarray:
    q = d.params
    k = d.kind
    if k == "gaussian":
        x = rng.normal(q["mu"], np.sqrt(q["var"]), size)
    elif k == "exponential":
        x = rng.exponential(1.0 / q["lambda"], size)
    elif k == "gamma":
        x = rng.gamma(q["a"], q["b"], size)
    elif k == "weibull":
        x = q["a"] * rng.weibull(q["b"], size)
    elif k == "rayleigh":
        x = rng.rayleigh(q["sigma"], size)
    elif k == "beta":
        x = rng.beta(q["a"], q["b"], size)
    elif k == "binomial":
        x = rng.binomial(q["n"], q["p"], size)
    elif k == "poisson":
        x = rng.poisson(q["lambda"], size)
    elif k == "geometric":
        # numpy counts trials; shift to failures before the first success
        x = rng.geometric(q["p"], size) - 1
    elif k == "negative_binomial":
        x = rng.negative_binomial(q["r"], q["p"], size)
    else:
        raise ParameterDomainError("kind", k, "a supported distribution")
    return np.asarray(x, dtype=float)


@dataclass(frozen=True, eq=False)
class SampleBatch:
    draws: np.ndarray
    seed: int
    generator_id: str = GENERATOR_ID


def sample(d: DistributionSpec, N: int, seed: int, stream: int = 0) -> SampleBatch:
    """``N`` i.i.d. draws of ``d`` as a ``(1, N)`` matrix."""
    if int(N) != N or N < 1:
        raise ParameterDomainError("N", N, "integer >= 1")
    N = int(N)
    parts = []
    for c, start in enumerate(range(0, N, CHUNK)):
        parts.append(draw(d, min(CHUNK, N - start), generator(seed, stream, 0, c)))
    return SampleBatch(np.concatenate(parts)[None, :], seed)


@dataclass(frozen=True, eq=False)
class MonteCarloResult(TransformResult):
    mean_se: Optional[np.ndarray] = None
    cov_se: Optional[np.ndarray] = None
    n_samples: int = 0
    seed: int = 0
    generator_id: str = GENERATOR_ID

    def to_dict(self) -> dict[str, Any]:
        out = super().to_dict()
        out.update(
            mean_se=self.mean_se.tolist(),
            cov_se=self.cov_se.tolist(),
            n_samples=self.n_samples,
            seed=self.seed,
            generator_id=self.generator_id,
        )
        return out


def _chunk_values(ds, f, seed, stream, c, size):
    x = np.vstack([draw(d, size, generator(seed, stream, j, c)) for j, d in enumerate(ds)])
    y = np.asarray(f(x), dtype=float)
    if y.ndim == 1:
        y = y[None, :] if y.shape[0] == size else y[:, None]
    if y.shape[1] != size:
        raise ShapeMismatchError(f"vectorized transform returned shape {y.shape} for {size} points")
    return y


def mc_truth(
    ds: Sequence[DistributionSpec],
    f: TransformFn,
    N: int = DEFAULT_TRUTH_N,
    seed: int = 42,
    stream: int = 0,
    workers: int = 1,
) -> MonteCarloResult:
    """Empirical moments of ``f(x)`` for ``x`` with independent coordinates ``ds``.

    ``f`` must be vectorized: it receives an ``(n, k)`` array of draws and
    returns ``(m, k)``. Two passes over regenerated streams give an exact
    centring; standard errors are the usual CLT estimates.
    """
    if int(N) != N or N < 2:
        raise ParameterDomainError("N", N, "integer >= 2")
    N = int(N)
    sizes = [min(CHUNK, N - s) for s in range(0, N, CHUNK)]

    def run(fn):
        if workers > 1:
            with ThreadPoolExecutor(workers) as pool:
                return list(pool.map(fn, range(len(sizes))))
        return [fn(c) for c in range(len(sizes))]

    total = sum(run(lambda c: _chunk_values(ds, f, seed, stream, c, sizes[c]).sum(axis=1)))
    mean = total / N

    def central(c):
        d = _chunk_values(ds, f, seed, stream, c, sizes[c]) - mean[:, None]
        return (
            d.sum(axis=1),
            d @ d.T,
            (d**3).sum(axis=1),
            (d**4).sum(axis=1),
            (d**2) @ (d**2).T,
        )

    sums = run(central)
    s1, s2, s3, s4, s22 = (sum(parts) for parts in zip(*sums))
    # first-order correction for the rounding residual in the mean
    resid = s1 / N
    mean = mean + resid
    cov = (s2 - N * np.outer(resid, resid)) / (N - 1)
    cov = 0.5 * (cov + cov.T)
    m2 = np.diag(s2) / N
    skew = s3 / N - 3 * resid * m2
    kurt = s4 / N
    cov_se = np.sqrt(np.maximum(s22 / N - cov**2, 0.0) / N)
    return MonteCarloResult(
        mean=mean,
        covariance=cov,
        skew_diag=skew,
        kurt_diag=kurt,
        transformed_points=None,
        min_eigenvalue=float(np.linalg.eigvalsh(cov)[0]),
        mean_se=np.sqrt(np.diag(cov) / N),
        cov_se=cov_se,
        n_samples=N,
        seed=seed,
    )
