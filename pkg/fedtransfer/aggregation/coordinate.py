"""Coordinate-wise trimmed mean and median."""

from typing import Optional

import numpy as np

from ..errors import InvalidArgumentError
from .base import Aggregator


class TrimmedMean(Aggregator):
    """Drop the ``trim_beta`` largest and smallest values per coordinate, average the rest."""

    name: str = "trimmed_mean"

    def __init__(self, trim_beta: int = 0) -> None:
        if trim_beta < 0:
            raise InvalidArgumentError(f"trim_beta must be >= 0, got {trim_beta}")
        self.trim_beta = int(trim_beta)

    def combine(self, matrix, weights: Optional[np.ndarray] = None):
        k = matrix.shape[0]
        if k <= 2 * self.trim_beta:
            raise InvalidArgumentError(
                f"trimmed mean needs K > 2 * beta, got K={k}, beta={self.trim_beta}"
            )
        ordered = np.sort(matrix, axis=0)
        return ordered[self.trim_beta : k - self.trim_beta].mean(axis=0)


class CoordinateMedian(Aggregator):
    """Coordinate-wise median; even K averages the two middle values."""

    name: str = "median"

    def combine(self, matrix, weights: Optional[np.ndarray] = None):
        return np.median(matrix, axis=0)
