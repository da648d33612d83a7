"""IID partitioning into near-equal shards."""

import numpy as np

from ...rng import derive_rng
from ..dataset import Dataset
from ..partition import Partition
from .base import Partitioner


class IIDPartitioner(Partitioner):
    """Shuffle all indices and cut them into N contiguous chunks.

    Chunk sizes differ by at most one; the first ``n mod N`` clients get the
    extra sample.
    """

    name: str = "iid"

    def split(self, dataset: Dataset, num_clients: int, seed: int) -> Partition:
        order = derive_rng(seed, "partition", self.name).permutation(dataset.n)
        chunks = np.array_split(order, num_clients)
        return Partition.from_assignments(chunks, dataset.n)
