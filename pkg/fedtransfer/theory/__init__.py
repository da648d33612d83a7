"""Numerical checks of the transferability theory: gradient alignment, bounds, bias-variance."""

from .alignment import (
    AlignmentFamily,
    Lemma1Result,
    binary_linear_params,
    binary_linear_spec,
    cosine,
    gradient_alignment_R,
    lemma1_check,
)
from .bias_variance import BiasVarianceReport, LinearRegressionFamily, bias_variance_mc
from .bound import (
    BoundReport,
    EmpiricalCheckReport,
    construct_theta_prime,
    theorem1_bound,
    theorem1_empirical_check,
)
from .constants import TheoryConstants, estimate_constants, power_iteration

__all__ = [
    "AlignmentFamily",
    "Lemma1Result",
    "cosine",
    "gradient_alignment_R",
    "lemma1_check",
    "binary_linear_spec",
    "binary_linear_params",
    "TheoryConstants",
    "estimate_constants",
    "power_iteration",
    "BoundReport",
    "EmpiricalCheckReport",
    "theorem1_bound",
    "theorem1_empirical_check",
    "construct_theta_prime",
    "BiasVarianceReport",
    "LinearRegressionFamily",
    "bias_variance_mc",
]
