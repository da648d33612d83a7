"""Geometric median by Weiszfeld iteration."""

from dataclasses import dataclass
from typing import Optional

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError
from ..logging_utils import get_logger
from .base import Aggregator, stack_updates, wrap

logger = get_logger(__name__)

# Distance under which an iterate is treated as sitting on an input point.
COINCIDENCE_TOL = 1e-12


@dataclass
class WeiszfeldResult:
    """Output of :func:`weiszfeld`."""

    point: npt.NDArray[np.float64]
    iterations: int
    converged: bool


def weiszfeld(matrix: npt.NDArray[np.float64], tol: float = 1e-10, max_iter: int = 1000) -> WeiszfeldResult:
    """Minimize the sum of Euclidean distances to the rows of ``matrix``.

    Starts from the coordinate-wise mean. When the iterate lands on input
    points, the Vardi-Zhang modified step is used; it stops on the spot when
    the pull of the remaining points does not exceed the number of coincident
    ones (the iterate is then the median).

    Args:
        matrix: K x d points.
        tol: Stop once an update moves less than this distance.
        max_iter: Soft cap on the number of updates.

    Returns:
        WeiszfeldResult with the final point and a convergence flag.
    """
    if tol <= 0:
        raise InvalidArgumentError(f"gm_tol must be > 0, got {tol}")
    y = matrix.mean(axis=0)
    for it in range(max_iter):
        dist = np.linalg.norm(matrix - y, axis=1)
        coincident = dist < COINCIDENCE_TOL
        free = ~coincident
        if not np.any(free):
            return WeiszfeldResult(y, it, True)
        w = 1.0 / dist[free]
        target = (w @ matrix[free]) / w.sum()
        if np.any(coincident):
            eta = float(np.count_nonzero(coincident))
            r = float(np.linalg.norm(w @ (matrix[free] - y)))
            if r <= eta:
                return WeiszfeldResult(y, it, True)
            y_new = max(0.0, 1.0 - eta / r) * target + min(1.0, eta / r) * y
        else:
            y_new = target
        step = float(np.linalg.norm(y_new - y))
        y = y_new
        if step < tol:
            return WeiszfeldResult(y, it + 1, True)
    logger.warning("Weiszfeld iteration stopped after %d steps without converging", max_iter)
    return WeiszfeldResult(y, max_iter, False)


class GeometricMedian(Aggregator):
    """Geometric median of the updates (Weiszfeld)."""

    name: str = "geometric_median"

    def __init__(self, gm_tol: float = 1e-10, gm_max_iter: int = 1000) -> None:
        if gm_tol <= 0:
            raise InvalidArgumentError(f"gm_tol must be > 0, got {gm_tol}")
        self.gm_tol = float(gm_tol)
        self.gm_max_iter = int(gm_max_iter)
        self.last_result: Optional[WeiszfeldResult] = None

    def combine(self, matrix, weights: Optional[np.ndarray] = None):
        self.last_result = weiszfeld(matrix, self.gm_tol, self.gm_max_iter)
        return self.last_result.point

    def to_dict(self):
        return {"class": self.name, "gm_tol": self.gm_tol, "gm_max_iter": self.gm_max_iter}


def geometric_median(updates, tol: float = 1e-10, max_iter: int = 1000):
    """Geometric median of ``updates`` (ParamVectors or arrays)."""
    matrix, template = stack_updates(updates)
    return wrap(weiszfeld(matrix, tol, max_iter).point, template)
