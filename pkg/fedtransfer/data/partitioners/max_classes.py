"""Pathological non-IID partitioning by label-sorted shards."""

import numpy as np

from ...errors import InvalidArgumentError
from ...rng import derive_rng
from ..dataset import Dataset
from ..partition import Partition, distinct_classes_per_client
from .base import Partitioner


class MaxClassesPartitioner(Partitioner):
    """Sort indices by label, cut N*C shards and deal C shards to each client.

    A client holds at most C classes, plus spillover where a shard straddles
    a label boundary. The actual distinct-class count per client is stored in
    the partition metadata under ``distinct_classes``.
    """

    name: str = "max_classes"

    def __init__(self, max_classes: int = 2):
        if max_classes < 1:
            raise InvalidArgumentError(f"max_classes must be >= 1, got {max_classes}")
        self.max_classes = int(max_classes)

    def split(self, dataset: Dataset, num_clients: int, seed: int) -> Partition:
        if self.max_classes > dataset.num_classes:
            raise InvalidArgumentError(
                f"max_classes ({self.max_classes}) exceeds num_classes ({dataset.num_classes})"
            )
        num_shards = num_clients * self.max_classes
        if num_shards > dataset.n:
            raise InvalidArgumentError(
                f"{num_shards} shards cannot be cut from {dataset.n} samples"
            )
        rng = derive_rng(seed, "partition", self.name)
        # Random order within each class, then a stable sort by label.
        shuffled = rng.permutation(dataset.n)
        by_label = shuffled[np.argsort(dataset.labels[shuffled], kind="stable")]
        shards = np.array_split(by_label, num_shards)
        dealt = rng.permutation(num_shards).reshape(num_clients, self.max_classes)
        assignments = [np.sort(np.concatenate([shards[s] for s in row])) for row in dealt]
        partition = Partition.from_assignments(assignments, dataset.n)
        partition.metadata["distinct_classes"] = distinct_classes_per_client(
            dataset.labels, partition
        )
        return partition
