"""Symmetric unscented transform used as the comparison baseline."""

from __future__ import annotations

import numpy as np

from .errors import ParameterDomainError
from .linalg import matrix_sqrt
from .sigma import SigmaPointSet


def default_kappa(n: int) -> float:
    # n + kappa = 3 matches the Gaussian fourth moment in one dimension
    return 3.0 - n


def ut_sigma_points(mean, P, kappa=None, sqrt_method="cholesky") -> SigmaPointSet:
    """2n+1 symmetric sigma points ``mean +/- sqrt(n + kappa) L[:, i]``.

    Points 1..n lie on the ``+`` side and n+1..2n on the ``-`` side. ``u`` and
    ``v`` are both recorded as ``sqrt(n + kappa)``. For n > 3 with the default
    kappa the centre weight is negative.
    """
    mean = np.atleast_1d(np.asarray(mean, dtype=float))
    n = mean.shape[0]
    if kappa is None:
        kappa = default_kappa(n)
    scale = n + kappa
    if not scale > 0:
        raise ParameterDomainError("kappa", kappa, f"n + kappa > 0 (n={n})")
    L = matrix_sqrt(P, sqrt_method)
    root = np.sqrt(scale)
    pts = np.column_stack([mean, mean[:, None] + root * L, mean[:, None] - root * L])
    weights = np.full(2 * n + 1, 1.0 / (2.0 * scale))
    weights[0] = kappa / scale
    spread = np.full(n, root)
    return SigmaPointSet(pts, weights, spread, spread)
