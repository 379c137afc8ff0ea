"""Generalized unscented transform.

Sigma points that match a random vector's mean, covariance and the diagonal
of its third and fourth central-moment tensors with 2n+1 points.
"""

from .errors import (
    AssumptionViolationError,
    ConstraintError,
    DegenerateVarianceError,
    EvaluationError,
    FactorizationError,
    FeasibilityError,
    GenUTError,
    InfeasibleVError,
    ParameterDomainError,
    ShapeMismatchError,
)
from .linalg import hadamard_div, hadamard_pow, matrix_sqrt
from .moments import DistributionSpec, MomentSpec, UnivariateMoments, independent_joint, moments_of
from .propagation import (
    TransformResult,
    propagate,
    sample_covariance,
    sample_kurt_diag,
    sample_mean,
    sample_skew_diag,
    transform_points,
)
from .sigma import (
    BoxConstraint,
    SigmaPointSet,
    check_feasibility,
    constrain,
    generate,
    kurtosis_matching_u,
)
from .ut import ut_sigma_points

__version__ = "0.1.0"

__all__ = [
    "AssumptionViolationError",
    "BoxConstraint",
    "ConstraintError",
    "DegenerateVarianceError",
    "DistributionSpec",
    "EvaluationError",
    "FactorizationError",
    "FeasibilityError",
    "GenUTError",
    "InfeasibleVError",
    "MomentSpec",
    "ParameterDomainError",
    "ShapeMismatchError",
    "SigmaPointSet",
    "TransformResult",
    "UnivariateMoments",
    "check_feasibility",
    "constrain",
    "generate",
    "hadamard_div",
    "hadamard_pow",
    "independent_joint",
    "kurtosis_matching_u",
    "matrix_sqrt",
    "moments_of",
    "propagate",
    "sample_covariance",
    "sample_kurt_diag",
    "sample_mean",
    "sample_skew_diag",
    "transform_points",
    "ut_sigma_points",
]
