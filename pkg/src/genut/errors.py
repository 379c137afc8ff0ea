"""Exception types raised across the package."""


class GenUTError(Exception):
    """Base class for all package errors."""


class ParameterDomainError(GenUTError, ValueError):
    """A distribution or algorithm parameter lies outside its domain."""

    def __init__(self, parameter, value, requirement):
        self.parameter = parameter
        self.value = value
        self.requirement = requirement
        super().__init__(f"parameter {parameter!r}={value!r} violates {requirement}")


class DegenerateVarianceError(GenUTError, ValueError):
    """A coordinate has zero variance, so the covariance is not positive definite."""


class FactorizationError(GenUTError, ValueError):
    """Cholesky factorization failed; ``pivot`` is the zero-based failing index."""

    def __init__(self, pivot, value):
        self.pivot = pivot
        self.value = value
        super().__init__(
            f"matrix is not positive definite: pivot {pivot} has value {value!r}"
        )


class FeasibilityError(GenUTError, ValueError):
    """Kurtosis matching is impossible for at least one coordinate."""

    def __init__(self, margins):
        self.margins = margins
        super().__init__(f"kurtosis matching infeasible, margins={list(margins)!r}")


class InfeasibleVError(GenUTError, ValueError):
    """The derived parameter ``v`` is not strictly positive."""

    def __init__(self, v):
        self.v = v
        super().__init__(f"v must be > 0 element-wise, got {list(v)!r}")


class AssumptionViolationError(GenUTError, ValueError):
    """The mean is not strictly inside the box constraint."""


class ConstraintError(GenUTError, ValueError):
    """Repaired sigma points still violate the box constraint."""


class EvaluationError(GenUTError, ValueError):
    """A transform returned a non-finite value at a sigma point."""

    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(f"transform produced non-finite output at point {index}: {value!r}")


class ShapeMismatchError(GenUTError, ValueError):
    """Arrays that must share a shape do not."""
