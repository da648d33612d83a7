"""Server-side aggregation rules."""

from .base import Aggregator
from .geometric_median import WeiszfeldResult, geometric_median, weiszfeld
from .krum import krum_scores, pairwise_sq_distances
from .registry import AGGREGATOR_REGISTRY, get_aggregator_class
from .rule import (
    AggregationKind,
    AggregationRule,
    aggregate,
    fedavg,
    krum,
    median,
    trimmed_mean,
)

__all__ = [
    "AggregationKind",
    "AggregationRule",
    "Aggregator",
    "AGGREGATOR_REGISTRY",
    "get_aggregator_class",
    "aggregate",
    "fedavg",
    "krum",
    "krum_scores",
    "pairwise_sq_distances",
    "trimmed_mean",
    "median",
    "geometric_median",
    "weiszfeld",
    "WeiszfeldResult",
]
