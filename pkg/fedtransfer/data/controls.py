"""Heterogeneity controls and the partition entry points built on them."""

import enum
from dataclasses import dataclass
from typing import Any, Dict

from ..errors import InvalidArgumentError
from .dataset import Dataset
from .partition import Partition
from .partitioners import (
    PARTITIONER_REGISTRY,
    DirichletPartitioner,
    IIDPartitioner,
    MaxClassesPartitioner,
    Partitioner,
    UnbalancedPartitioner,
)


class PartitionScheme(str, enum.Enum):
    """Client partitioning schemes."""

    IID = "iid"
    DIRICHLET = "dirichlet"
    UNBALANCED = "unbalanced"
    MAX_CLASSES = "max_classes"


@dataclass
class HeterogeneityControls:
    """Which partitioning scheme is active and its parameters.

    Only the parameter of the active scheme is used; the others are kept so
    a scenario can switch schemes with a single override.
    """

    scheme: PartitionScheme = PartitionScheme.IID
    alpha: float = 0.5
    sgm: float = 0.0
    max_classes: int = 2
    min_size: int = 1

    def __post_init__(self) -> None:
        self.scheme = PartitionScheme(self.scheme)
        if not self.alpha > 0:
            raise InvalidArgumentError(f"alpha must be > 0, got {self.alpha}")
        if self.sgm < 0:
            raise InvalidArgumentError(f"sgm must be >= 0, got {self.sgm}")
        if self.max_classes < 1:
            raise InvalidArgumentError(f"max_classes must be >= 1, got {self.max_classes}")

    def build_partitioner(self) -> Partitioner:
        """Instantiate the partitioner of the active scheme."""
        if self.scheme is PartitionScheme.DIRICHLET:
            return DirichletPartitioner(alpha=self.alpha, min_size=self.min_size)
        if self.scheme is PartitionScheme.UNBALANCED:
            return UnbalancedPartitioner(sgm=self.sgm)
        if self.scheme is PartitionScheme.MAX_CLASSES:
            return MaxClassesPartitioner(max_classes=self.max_classes)
        return PARTITIONER_REGISTRY[self.scheme.value]()

    def partition(self, dataset: Dataset, num_clients: int, seed: int) -> Partition:
        """Partition ``dataset`` with the active scheme."""
        return self.build_partitioner()(dataset, num_clients, seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "scheme": self.scheme.value,
            "alpha": self.alpha,
            "sgm": self.sgm,
            "max_classes": self.max_classes,
            "min_size": self.min_size,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "HeterogeneityControls":
        return cls(**d)


def partition_iid(dataset: Dataset, num_clients: int, seed: int) -> Partition:
    """Shuffled split into ``num_clients`` chunks whose sizes differ by at most one."""
    return IIDPartitioner()(dataset, num_clients, seed)


def partition_dirichlet(
    dataset: Dataset, num_clients: int, alpha: float, seed: int, min_size: int = 1
) -> Partition:
    """Per-class Dirichlet(alpha) label skew, redrawn until every client has ``min_size`` samples."""
    return DirichletPartitioner(alpha=alpha, min_size=min_size)(dataset, num_clients, seed)


def partition_unbalanced(dataset: Dataset, num_clients: int, sgm: float, seed: int) -> Partition:
    """IID composition with log-normal client sizes."""
    return UnbalancedPartitioner(sgm=sgm)(dataset, num_clients, seed)


def partition_max_classes(
    dataset: Dataset, num_clients: int, max_classes: int, seed: int
) -> Partition:
    """Label-sorted shard dealing, ``max_classes`` shards per client."""
    return MaxClassesPartitioner(max_classes=max_classes)(dataset, num_clients, seed)
