"""Partitioner registry."""

from typing import Dict, Type

from .base import Partitioner
from .dirichlet import DirichletPartitioner
from .iid import IIDPartitioner
from .max_classes import MaxClassesPartitioner
from .unbalanced import UnbalancedPartitioner, lognormal_sizes

# Registry mapping scheme names to their classes
PARTITIONER_REGISTRY: Dict[str, Type[Partitioner]] = {
    IIDPartitioner.name: IIDPartitioner,
    DirichletPartitioner.name: DirichletPartitioner,
    UnbalancedPartitioner.name: UnbalancedPartitioner,
    MaxClassesPartitioner.name: MaxClassesPartitioner,
}

__all__ = [
    "Partitioner",
    "IIDPartitioner",
    "DirichletPartitioner",
    "UnbalancedPartitioner",
    "MaxClassesPartitioner",
    "PARTITIONER_REGISTRY",
    "lognormal_sizes",
]
