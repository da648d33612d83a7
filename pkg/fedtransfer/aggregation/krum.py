"""Krum and Multi-Krum selection."""

from typing import Optional

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError
from .base import Aggregator


def pairwise_sq_distances(matrix: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Squared Euclidean distances between all rows, from explicit differences."""
    diff = matrix[:, None, :] - matrix[None, :, :]
    return np.sum(diff * diff, axis=2)


def krum_scores(matrix: npt.NDArray[np.float64], f: int) -> npt.NDArray[np.float64]:
    """Sum of squared distances from each update to its ``K - f - 2`` nearest others.

    Raises:
        InvalidArgumentError: When ``K < f + 3``.
    """
    k = matrix.shape[0]
    if f < 0:
        raise InvalidArgumentError(f"byzantine_f must be >= 0, got {f}")
    if k < f + 3:
        raise InvalidArgumentError(f"krum needs K >= f + 3 updates, got K={k}, f={f}")
    dist = pairwise_sq_distances(matrix)
    neighbours = k - f - 2
    scores = np.empty(k)
    for i in range(k):
        others = np.delete(dist[i], i)
        scores[i] = np.sort(others)[:neighbours].sum()
    return scores


class Krum(Aggregator):
    """Return the update with the lowest Krum score; ties go to the lowest index."""

    name: str = "krum"

    def __init__(self, byzantine_f: int = 0) -> None:
        self.byzantine_f = int(byzantine_f)

    def combine(self, matrix, weights: Optional[np.ndarray] = None):
        scores = krum_scores(matrix, self.byzantine_f)
        return matrix[int(np.argmin(scores))].copy()


class MultiKrum(Aggregator):
    """Average the ``multi_m`` updates with the lowest Krum scores."""

    name: str = "multikrum"

    def __init__(self, byzantine_f: int = 0, multi_m: int = 1) -> None:
        if multi_m < 1:
            raise InvalidArgumentError(f"multi_m must be >= 1, got {multi_m}")
        self.byzantine_f = int(byzantine_f)
        self.multi_m = int(multi_m)

    def combine(self, matrix, weights: Optional[np.ndarray] = None):
        scores = krum_scores(matrix, self.byzantine_f)
        if self.multi_m > matrix.shape[0]:
            raise InvalidArgumentError(
                f"multi_m ({self.multi_m}) exceeds the number of updates ({matrix.shape[0]})"
            )
        chosen = np.argsort(scores, kind="stable")[: self.multi_m]
        return matrix[np.sort(chosen)].mean(axis=0)
