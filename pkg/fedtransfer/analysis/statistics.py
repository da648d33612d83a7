"""Goodness-of-fit metrics."""

from typing import Tuple

import numpy as np
import numpy.typing as npt

from ..errors import ShapeMismatchError


def _paired(observed: npt.ArrayLike, fitted: npt.ArrayLike) -> Tuple[np.ndarray, np.ndarray]:
    obs = np.asarray(observed, dtype=np.float64).ravel()
    fit = np.asarray(fitted, dtype=np.float64).ravel()
    if obs.shape != fit.shape:
        raise ShapeMismatchError(f"{obs.size} observed values vs {fit.size} fitted values")
    return obs, fit


def rmse(observed: npt.ArrayLike, fitted: npt.ArrayLike) -> float:
    """Root mean squared residual."""
    obs, fit = _paired(observed, fitted)
    return float(np.sqrt(np.mean(np.square(obs - fit))))


def r2(observed: npt.ArrayLike, fitted: npt.ArrayLike) -> float:
    """Share of the variance of ``observed`` explained by ``fitted``, in [0, 1].

    A constant response has nothing to explain and scores 0.
    """
    obs, fit = _paired(observed, fitted)
    sst = float(np.sum(np.square(obs - obs.mean())))
    if sst == 0.0:
        return 0.0
    sse = float(np.sum(np.square(obs - fit)))
    return float(np.clip(1.0 - sse / sst, 0.0, 1.0))
