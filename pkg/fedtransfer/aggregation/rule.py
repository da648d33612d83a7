"""Aggregation rule configuration and dispatch."""

import enum
from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy.typing as npt

from ..errors import InvalidArgumentError
from .base import Aggregator, Updates, stack_updates, wrap
from .coordinate import CoordinateMedian, TrimmedMean
from .fedavg import FedAvg
from .krum import Krum, MultiKrum
from .registry import get_aggregator_class


class AggregationKind(str, enum.Enum):
    """Rule names accepted in scenario files."""

    FEDAVG = "fedavg"
    KRUM = "krum"
    MULTIKRUM = "multikrum"
    TRIMMED_MEAN = "trimmed_mean"
    MEDIAN = "median"
    GEOMETRIC_MEDIAN = "geometric_median"


# Rule fields forwarded to each aggregator constructor
_RULE_PARAMS = {
    AggregationKind.KRUM: ("byzantine_f",),
    AggregationKind.MULTIKRUM: ("byzantine_f", "multi_m"),
    AggregationKind.TRIMMED_MEAN: ("trim_beta",),
    AggregationKind.GEOMETRIC_MEDIAN: ("gm_tol", "gm_max_iter"),
}


@dataclass
class AggregationRule:
    """Server aggregation rule and its parameters.

    ``byzantine_f`` and ``multi_m`` apply to the Krum family, ``trim_beta`` to the
    trimmed mean and ``gm_tol``/``gm_max_iter`` to the geometric median.
    """

    kind: AggregationKind = AggregationKind.FEDAVG
    byzantine_f: int = 0
    multi_m: int = 1
    trim_beta: int = 0
    gm_tol: float = 1e-10
    gm_max_iter: int = 1000

    def __post_init__(self) -> None:
        self.kind = AggregationKind(self.kind)
        if self.byzantine_f < 0:
            raise InvalidArgumentError(f"byzantine_f must be >= 0, got {self.byzantine_f}")
        if self.trim_beta < 0:
            raise InvalidArgumentError(f"trim_beta must be >= 0, got {self.trim_beta}")
        if not self.gm_tol > 0:
            raise InvalidArgumentError(f"gm_tol must be > 0, got {self.gm_tol}")
        if self.multi_m < 1:
            raise InvalidArgumentError(f"multi_m must be >= 1, got {self.multi_m}")

    def min_updates(self) -> int:
        """Smallest K for which the rule is defined."""
        if self.kind in (AggregationKind.KRUM, AggregationKind.MULTIKRUM):
            return max(self.byzantine_f + 3, self.multi_m if self.kind is AggregationKind.MULTIKRUM else 1)
        if self.kind is AggregationKind.TRIMMED_MEAN:
            return 2 * self.trim_beta + 1
        return 1

    def build(self) -> Aggregator:
        """Instantiate the aggregator for this rule."""
        params = {name: getattr(self, name) for name in _RULE_PARAMS.get(self.kind, ())}
        return get_aggregator_class(self.kind.value)(**params)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "byzantine_f": self.byzantine_f,
            "multi_m": self.multi_m,
            "trim_beta": self.trim_beta,
            "gm_tol": self.gm_tol,
            "gm_max_iter": self.gm_max_iter,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "AggregationRule":
        return cls(**d)


def aggregate(rule: AggregationRule, updates: Updates, weights: Optional[npt.ArrayLike] = None):
    """Aggregate K updates with ``rule``.

    A single update is returned unchanged for every rule.

    Args:
        rule: Aggregation rule.
        updates: K ParamVectors (or arrays) of equal length.
        weights: Client weights summing to 1 (used by fedavg only).

    Returns:
        Aggregated vector, as a ParamVector when the updates are ParamVectors.

    Raises:
        ShapeMismatchError: If the updates differ in length.
        InvalidArgumentError: For rule-specific preconditions (e.g. K < f + 3 for krum).
    """
    matrix, template = stack_updates(updates)
    if matrix.shape[0] == 1:
        return wrap(matrix[0].copy(), template)
    return rule.build()(updates, weights)


def fedavg(updates: Updates, weights: Optional[npt.ArrayLike] = None):
    """Weighted average of the updates."""
    return FedAvg()(updates, weights)


def krum(updates: Updates, f: int, multi_m: int = 1):
    """Krum selection (``multi_m = 1``) or the Multi-Krum average of the ``multi_m`` best."""
    if multi_m == 1:
        return Krum(f)(updates)
    return MultiKrum(f, multi_m)(updates)


def trimmed_mean(updates: Updates, beta: int):
    """Coordinate-wise mean after dropping ``beta`` extremes on each side."""
    return TrimmedMean(beta)(updates)


def median(updates: Updates):
    """Coordinate-wise median."""
    return CoordinateMedian()(updates)
