"""Ordinary least-squares line fits with a slope test."""

from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence

import numpy as np
from scipy import stats

from ..errors import DegenerateInputError, InvalidArgumentError
from .spearman import drop_missing
from .statistics import r2, rmse


@dataclass(frozen=True)
class LinFit:
    """``y = slope * x + intercept`` with fit quality and the two-tailed slope p-value."""

    slope: float
    intercept: float
    r_squared: float
    n: int
    residual_rmse: float
    slope_p_value: Optional[float] = None

    def predict(self, xs: Sequence[float]) -> np.ndarray:
        return self.slope * np.asarray(xs, dtype=np.float64) + self.intercept

    def to_dict(self) -> Dict[str, Any]:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n": self.n,
            "residual_rmse": self.residual_rmse,
            "slope_p_value": self.slope_p_value,
        }


def linfit(xs: Sequence[Optional[float]], ys: Sequence[Optional[float]]) -> LinFit:
    """Closed-form least squares on the complete pairs of ``xs`` and ``ys``.

    ``slope_p_value`` tests slope = 0 with n-2 degrees of freedom; it is None
    for n = 2. Constant ``ys`` give slope 0 and r_squared 0.

    Raises:
        InvalidArgumentError: On length mismatch or fewer than 2 points.
        DegenerateInputError: If all ``xs`` are equal.
    """
    x, y = drop_missing(xs, ys)
    n = int(x.size)
    if n < 2:
        raise InvalidArgumentError(f"linfit needs at least 2 points, got {n}")
    x_mean, y_mean = x.mean(), y.mean()
    sxx = float(np.sum((x - x_mean) ** 2))
    if sxx == 0:
        raise DegenerateInputError("linfit is undefined when all x values are equal")
    slope = float(np.sum((x - x_mean) * (y - y_mean)) / sxx)
    intercept = float(y_mean - slope * x_mean)
    fitted = slope * x + intercept

    p_value = None
    if n > 2:
        ssr = float(np.sum((y - fitted) ** 2))
        if ssr == 0:
            p_value = 0.0 if slope != 0 else 1.0
        else:
            se = np.sqrt(ssr / (n - 2) / sxx)
            p_value = float(min(1.0, 2.0 * stats.t.sf(abs(slope / se), n - 2)))
    return LinFit(slope, intercept, r2(y, fitted), n, rmse(y, fitted), p_value)
