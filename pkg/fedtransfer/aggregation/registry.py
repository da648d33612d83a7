"""Aggregator registry."""

from typing import Dict, Type

from .base import Aggregator
from .coordinate import CoordinateMedian, TrimmedMean
from .fedavg import FedAvg
from .geometric_median import GeometricMedian
from .krum import Krum, MultiKrum

# Registry mapping rule names to aggregator classes
AGGREGATOR_REGISTRY: Dict[str, Type[Aggregator]] = {
    FedAvg.name: FedAvg,
    Krum.name: Krum,
    MultiKrum.name: MultiKrum,
    TrimmedMean.name: TrimmedMean,
    CoordinateMedian.name: CoordinateMedian,
    GeometricMedian.name: GeometricMedian,
}


def get_aggregator_class(name: str) -> Type[Aggregator]:
    """Look up an aggregator class by rule name.

    Raises:
        KeyError: If the name is not registered.
    """
    if name not in AGGREGATOR_REGISTRY:
        available = ", ".join(AGGREGATOR_REGISTRY.keys())
        raise KeyError(f"Aggregation rule '{name}' not found. Available: {available}")
    return AGGREGATOR_REGISTRY[name]
