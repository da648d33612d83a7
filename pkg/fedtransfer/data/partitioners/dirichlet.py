"""Label-skewed partitioning with per-class Dirichlet proportions."""

import numpy as np

from ...errors import InvalidArgumentError, PartitionExhaustedError
from ...logging_utils import get_logger
from ...rng import derive_rng
from ..dataset import Dataset
from ..partition import Partition
from .base import Partitioner

logger = get_logger(__name__)

MAX_RETRIES = 100


class DirichletPartitioner(Partitioner):
    """Distribute each class over clients with proportions ~ Dirichlet(alpha * 1_N).

    Smaller ``alpha`` concentrates every class on fewer clients (more
    non-IID). When some client ends up with fewer than ``min_size`` samples,
    the whole partition is redrawn from a fresh substream, up to
    ``max_retries`` attempts.
    """

    name: str = "dirichlet"

    def __init__(self, alpha: float = 0.5, min_size: int = 1, max_retries: int = MAX_RETRIES):
        if not alpha > 0:
            raise InvalidArgumentError(f"alpha must be > 0, got {alpha}")
        if min_size < 1:
            raise InvalidArgumentError(f"min_size must be >= 1, got {min_size}")
        self.alpha = float(alpha)
        self.min_size = int(min_size)
        self.max_retries = int(max_retries)

    def _attempt(self, labels, num_classes: int, num_clients: int, rng) -> list:
        buckets = [[] for _ in range(num_clients)]
        for c in range(num_classes):
            idx = np.flatnonzero(labels == c)
            if idx.size == 0:
                continue
            rng.shuffle(idx)
            proportions = rng.dirichlet(np.full(num_clients, self.alpha))
            cuts = (np.cumsum(proportions) * idx.size).astype(np.int64)[:-1]
            for k, part in enumerate(np.split(idx, cuts)):
                buckets[k].append(part)
        return [
            np.sort(np.concatenate(b)) if b else np.empty(0, dtype=np.int64) for b in buckets
        ]

    def split(self, dataset: Dataset, num_clients: int, seed: int) -> Partition:
        if num_clients * self.min_size > dataset.n:
            raise InvalidArgumentError(
                f"{num_clients} clients x min_size {self.min_size} exceeds {dataset.n} samples"
            )
        for attempt in range(self.max_retries):
            rng = derive_rng(seed, "partition", self.name, attempt)
            assignments = self._attempt(dataset.labels, dataset.num_classes, num_clients, rng)
            smallest = min(a.size for a in assignments)
            if smallest >= self.min_size:
                if attempt:
                    logger.debug("Dirichlet partition accepted after %d redraws", attempt)
                return Partition.from_assignments(
                    assignments, dataset.n, metadata={"attempts": attempt + 1}
                )
        raise PartitionExhaustedError(
            f"no Dirichlet(alpha={self.alpha}) partition with every client holding "
            f">= {self.min_size} samples after {self.max_retries} attempts"
        )
