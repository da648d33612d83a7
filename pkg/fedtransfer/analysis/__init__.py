"""Correlation and regression statistics for sweep results."""

from .regression import LinFit, linfit
from .spearman import (
    SpearmanMethod,
    SpearmanResult,
    drop_missing,
    exact_permutation_p_value,
    monte_carlo_permutation_p_value,
    spearman,
    t_approx_p_value,
)
from .statistics import r2, rmse

__all__ = [
    "SpearmanMethod",
    "SpearmanResult",
    "spearman",
    "drop_missing",
    "t_approx_p_value",
    "exact_permutation_p_value",
    "monte_carlo_permutation_p_value",
    "LinFit",
    "linfit",
    "rmse",
    "r2",
]
