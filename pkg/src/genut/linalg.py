"""Small dense linear algebra used by the sigma-point constructions."""

from __future__ import annotations

import numpy as np

from .errors import FactorizationError, ParameterDomainError, ShapeMismatchError

SYMMETRY_RTOL = 1e-12


def _symmetrized(P):
    P = np.array(P, dtype=float)
    if P.ndim == 0:
        P = P.reshape(1, 1)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ShapeMismatchError(f"expected a square matrix, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise ParameterDomainError("P", P.tolist(), "finite entries")
    scale = np.max(np.abs(P)) if P.size else 0.0
    asym = np.max(np.abs(P - P.T)) if P.size else 0.0
    if asym > SYMMETRY_RTOL * max(scale, np.finfo(float).tiny):
        raise ParameterDomainError("P", f"asymmetry {asym:.3e}", f"symmetric within {SYMMETRY_RTOL} relative")
    return 0.5 * (P + P.T)


def cholesky(P):
    """Lower-triangular ``L`` with ``L @ L.T == P``.

    Row-oriented Cholesky-Banachiewicz. Raises :class:`FactorizationError`
    naming the first pivot that is not strictly positive.
    """
    A = _symmetrized(P)
    n = A.shape[0]
    L = np.zeros_like(A)
    for i in range(n):
        for j in range(i):
            L[i, j] = (A[i, j] - L[i, :j] @ L[j, :j]) / L[j, j]
        d = A[i, i] - L[i, :i] @ L[i, :i]
        if not d > 0:
            raise FactorizationError(i, float(d))
        L[i, i] = np.sqrt(d)
    return L


def symmetric_sqrt(P):
    """Symmetric positive-definite square root via eigendecomposition."""
    A = _symmetrized(P)
    vals, vecs = np.linalg.eigh(A)
    if vals.size and not vals[0] > 0:
        # report the pivot Cholesky would fail on, for a consistent error
        cholesky(A)
        raise FactorizationError(int(np.argmin(vals)), float(vals[0]))
    return (vecs * np.sqrt(vals)) @ vecs.T


def matrix_sqrt(P, method="cholesky"):
    """Square root ``R`` of an SPD matrix with ``R @ R.T == P``.

    ``method`` is ``"cholesky"`` (lower triangular, the default) or
    ``"symmetric"``. Sigma-point locations depend on the choice; the moments
    they match do not.
    """
    if method == "cholesky":
        return cholesky(P)
    if method == "symmetric":
        return symmetric_sqrt(P)
    raise ParameterDomainError("method", method, "'cholesky' or 'symmetric'")


def hadamard_pow(v, k):
    """Element-wise ``v**k`` for integer ``k != 0``; negative ``k`` is the reciprocal power."""
    if int(k) != k or k == 0:
        raise ParameterDomainError("k", k, "a nonzero integer")
    v = np.asarray(v, dtype=float)
    if k < 0:
        zero = np.flatnonzero(v == 0)
        if zero.size:
            raise ZeroDivisionError(f"entry {int(zero[0])} is zero; cannot raise to power {k}")
        return 1.0 / v ** (-int(k))
    return v ** int(k)


def hadamard_div(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ShapeMismatchError(f"shapes differ: {a.shape} vs {b.shape}")
    zero = np.flatnonzero(b == 0)
    if zero.size:
        raise ZeroDivisionError(f"divisor entry {int(zero[0])} is zero")
    return a / b
