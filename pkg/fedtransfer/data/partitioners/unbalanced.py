"""Quantity-skewed partitioning with log-normal client sizes."""

import numpy as np

from ...errors import InvalidArgumentError
from ...rng import derive_rng
from ..dataset import Dataset
from ..partition import Partition
from .base import Partitioner


def lognormal_sizes(n: int, num_clients: int, sgm: float, rng: np.random.Generator) -> np.ndarray:
    """Client sizes proportional to LogNormal(0, sgm^2) draws, summing exactly to n.

    Sizes are floored at 1 and the shortfall is handed out by largest remainder;
    any excess created by the floor is taken back from the largest clients.
    """
    draws = rng.lognormal(mean=0.0, sigma=sgm, size=num_clients)
    raw = draws / draws.sum() * n
    sizes = np.maximum(np.floor(raw).astype(np.int64), 1)
    remainders = raw - np.floor(raw)
    deficit = n - int(sizes.sum())
    if deficit > 0:
        # Stable sort on negated remainders: ties go to the lower client id.
        order = np.argsort(-remainders, kind="stable")
        for k in range(deficit):
            sizes[order[k % num_clients]] += 1
    while deficit < 0:
        order = np.argsort(-sizes, kind="stable")
        donor = order[0]
        if sizes[donor] <= 1:
            raise InvalidArgumentError(f"cannot give {num_clients} clients one of {n} samples each")
        sizes[donor] -= 1
        deficit += 1
    return sizes


class UnbalancedPartitioner(Partitioner):
    """IID class composition with log-normally distributed client sizes.

    ``sgm = 0`` reduces to the IID split (sizes equal to within one).
    """

    name: str = "unbalanced"

    def __init__(self, sgm: float = 0.0):
        if sgm < 0:
            raise InvalidArgumentError(f"sgm must be >= 0, got {sgm}")
        self.sgm = float(sgm)

    def split(self, dataset: Dataset, num_clients: int, seed: int) -> Partition:
        rng = derive_rng(seed, "partition", self.name)
        sizes = lognormal_sizes(dataset.n, num_clients, self.sgm, rng)
        order = rng.permutation(dataset.n)
        chunks = np.split(order, np.cumsum(sizes)[:-1])
        return Partition.from_assignments(chunks, dataset.n, metadata={"sizes": sizes.tolist()})
