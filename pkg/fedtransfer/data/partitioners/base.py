"""Base interface for client partitioners."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Type, TypeVar

from ...errors import InvalidArgumentError
from ..dataset import Dataset
from ..partition import Partition

T = TypeVar("T", bound="Partitioner")


class Partitioner(ABC):
    """Base interface for all partitioning schemes.

    Subclasses hold their scheme parameters as instance attributes and
    implement :meth:`split`. Calling the partitioner validates the client
    count, runs :meth:`split` and checks the partition invariants.
    """

    name: str = "base"

    def __call__(self, dataset: Dataset, num_clients: int, seed: int) -> Partition:
        """Partition ``dataset`` across ``num_clients`` clients.

        Args:
            dataset: Dataset whose indices are distributed.
            num_clients: Number of clients N (1 <= N <= n).
            seed: Seed of the partition stream.

        Returns:
            Validated Partition.
        """
        if num_clients < 1:
            raise InvalidArgumentError(f"num_clients must be >= 1, got {num_clients}")
        if num_clients > dataset.n:
            raise InvalidArgumentError(
                f"num_clients ({num_clients}) exceeds the number of samples ({dataset.n})"
            )
        partition = self.split(dataset, num_clients, seed)
        partition.metadata.setdefault("scheme", self.name)
        partition.metadata.setdefault("params", self.to_dict())
        partition.validate(dataset.n)
        return partition

    @abstractmethod
    def split(self, dataset: Dataset, num_clients: int, seed: int) -> Partition:
        """Produce the partition; arguments are already validated."""
        ...

    def to_dict(self) -> Dict[str, Any]:
        """Serialize scheme parameters (all instance attributes plus the class name)."""
        d = vars(self).copy()
        d["class"] = self.name
        return d

    @classmethod
    def from_dict(cls: Type[T], d: Dict[str, Any]) -> T:
        """Reconstruct a partitioner from :meth:`to_dict` output."""
        d = d.copy()
        d.pop("class", None)
        return cls(**d)
