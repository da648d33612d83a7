"""Weighted federated averaging."""

from typing import Optional

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError
from .base import Aggregator

WEIGHT_SUM_TOL = 1e-9


class FedAvg(Aggregator):
    """``sum_k p_k u_k``; uniform weights when none are given."""

    name: str = "fedavg"

    def combine(
        self, matrix: npt.NDArray[np.float64], weights: Optional[npt.NDArray[np.float64]]
    ) -> npt.NDArray[np.float64]:
        if weights is None:
            weights = np.full(matrix.shape[0], 1.0 / matrix.shape[0])
        if np.any(weights < 0):
            raise InvalidArgumentError("fedavg weights must be nonnegative")
        if abs(float(weights.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidArgumentError(f"fedavg weights sum to {weights.sum()!r}, expected 1")
        return weights @ matrix
