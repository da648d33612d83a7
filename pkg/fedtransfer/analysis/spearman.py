"""Spearman rank correlation with two-tailed significance tests."""

import itertools
import math
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy import stats

from ..errors import DegenerateInputError, InvalidArgumentError
from ..rng import derive_rng

MIN_POINTS = 4
# Below this size the exact permutation distribution (n! orderings) is enumerated.
EXACT_PERMUTATION_LIMIT = 10
PERMUTATION_CHUNK = 10_000
# Permuted statistics within this distance of |rho| count as "at least as extreme".
_TIE_TOL = 1e-12


class SpearmanMethod(Enum):
    T_APPROX = "t_approx"
    PERMUTATION = "permutation"


@dataclass(frozen=True)
class SpearmanResult:
    """Correlation of ranks and its two-tailed p-value.

    ``p_value`` comes from ``method``; the other test's p-value is kept
    alongside when it was computed.
    """

    rho: float
    p_value: float
    n: int
    method: SpearmanMethod
    t_p_value: Optional[float] = None
    permutation_p_value: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rho": self.rho,
            "p_value": self.p_value,
            "n": self.n,
            "method": self.method.value,
            "t_p_value": self.t_p_value,
            "permutation_p_value": self.permutation_p_value,
        }


def drop_missing(
    xs: Sequence[Optional[float]], ys: Sequence[Optional[float]]
) -> Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]:
    """Drop pairs where either side is None or not finite.

    Raises:
        InvalidArgumentError: If the sequences differ in length.
    """
    if len(xs) != len(ys):
        raise InvalidArgumentError(f"length mismatch: {len(xs)} vs {len(ys)}")
    keep = [
        (float(x), float(y))
        for x, y in zip(xs, ys)
        if x is not None and y is not None and math.isfinite(x) and math.isfinite(y)
    ]
    if not keep:
        return np.zeros(0), np.zeros(0)
    arr = np.array(keep, dtype=np.float64)
    return arr[:, 0], arr[:, 1]


def _centered_unit(ranks: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    centered = ranks - ranks.mean()
    return centered / np.linalg.norm(centered)


def t_approx_p_value(rho: float, n: int) -> float:
    """Two-tailed p-value of ``t = rho sqrt((n-2)/(1-rho^2))`` with n-2 degrees of freedom."""
    if abs(rho) >= 1.0:
        return 0.0
    t = rho * np.sqrt((n - 2) / (1 - rho**2))
    return float(min(1.0, 2.0 * stats.t.sf(abs(t), n - 2)))


def exact_permutation_p_value(rank_x: npt.NDArray[np.float64], rank_y: npt.NDArray[np.float64]) -> float:
    """Fraction of all n! orderings of ``rank_y`` with |rho| at least the observed one."""
    ux, uy = _centered_unit(rank_x), _centered_unit(rank_y)
    observed = abs(float(ux @ uy))
    orders = np.array(list(itertools.permutations(range(uy.size))), dtype=np.int64)
    rhos = uy[orders] @ ux
    return float(np.mean(np.abs(rhos) >= observed - _TIE_TOL))


def monte_carlo_permutation_p_value(
    rank_x: npt.NDArray[np.float64],
    rank_y: npt.NDArray[np.float64],
    resamples: int,
    seed: int,
) -> float:
    """Permutation p-value from ``resamples`` random shuffles, ``(hits + 1) / (resamples + 1)``."""
    ux, uy = _centered_unit(rank_x), _centered_unit(rank_y)
    observed = abs(float(ux @ uy))
    rng = derive_rng(seed, "spearman", "permutation")
    hits = 0
    remaining = resamples
    while remaining > 0:
        size = min(PERMUTATION_CHUNK, remaining)
        shuffled = rng.permuted(np.tile(uy, (size, 1)), axis=1)
        hits += int(np.count_nonzero(np.abs(shuffled @ ux) >= observed - _TIE_TOL))
        remaining -= size
    return (hits + 1) / (resamples + 1)


def spearman(
    xs: Sequence[Optional[float]],
    ys: Sequence[Optional[float]],
    permutation_resamples: int = 100_000,
    seed: int = 0,
) -> SpearmanResult:
    """Spearman rho with average ranks for ties and a two-tailed p-value.

    Pairs with a missing value are dropped first. With fewer than 10 points
    the p-value is the exact permutation p-value; otherwise it is the
    t-approximation, with a Monte Carlo permutation p-value reported beside it
    (skipped when ``permutation_resamples`` is 0).

    Raises:
        InvalidArgumentError: On length mismatch or fewer than 4 complete pairs.
        DegenerateInputError: If either input is constant.
    """
    x, y = drop_missing(xs, ys)
    n = int(x.size)
    if n < MIN_POINTS:
        raise InvalidArgumentError(f"spearman needs at least {MIN_POINTS} points, got {n}")
    if np.all(x == x[0]) or np.all(y == y[0]):
        raise DegenerateInputError("spearman is undefined for constant input")

    rank_x = stats.rankdata(x, method="average")
    rank_y = stats.rankdata(y, method="average")
    rho = float(np.clip(_centered_unit(rank_x) @ _centered_unit(rank_y), -1.0, 1.0))

    if n < EXACT_PERMUTATION_LIMIT:
        p_perm = exact_permutation_p_value(rank_x, rank_y)
        return SpearmanResult(
            rho, p_perm, n, SpearmanMethod.PERMUTATION,
            t_p_value=t_approx_p_value(rho, n) if n > 2 else None,
            permutation_p_value=p_perm,
        )
    p_t = t_approx_p_value(rho, n)
    p_perm = None
    if permutation_resamples > 0:
        p_perm = monte_carlo_permutation_p_value(rank_x, rank_y, permutation_resamples, seed)
    return SpearmanResult(rho, p_t, n, SpearmanMethod.T_APPROX, t_p_value=p_t, permutation_p_value=p_perm)
