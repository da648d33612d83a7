"""Client partitions of a dataset."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError

WEIGHT_SUM_TOL = 1e-12


@dataclass
class Partition:
    """Assignment of dataset indices to N clients.

    ``assignments[k]`` holds the sample indices of client k and
    ``weights[k] = n_k / n``. Construct through :meth:`from_assignments`
    to get weights computed and invariants checked.
    """

    assignments: List[npt.NDArray[np.int64]]
    weights: npt.NDArray[np.float64]
    metadata: Dict[str, Any] = field(default_factory=dict)

    @classmethod
    def from_assignments(
        cls,
        assignments: Sequence[Sequence[int]],
        n_total: int,
        metadata: Optional[Dict[str, Any]] = None,
    ) -> "Partition":
        """Build a partition from index lists, computing ``p_k = n_k / n``."""
        arrays = [np.asarray(a, dtype=np.int64) for a in assignments]
        sizes = np.array([a.size for a in arrays], dtype=np.float64)
        partition = cls(arrays, sizes / float(n_total), dict(metadata or {}))
        partition.validate(n_total)
        return partition

    @property
    def num_clients(self) -> int:
        """Number of clients N."""
        return len(self.assignments)

    @property
    def sizes(self) -> npt.NDArray[np.int64]:
        """Number of samples per client."""
        return np.array([a.size for a in self.assignments], dtype=np.int64)

    @property
    def n_total(self) -> int:
        """Total number of assigned samples."""
        return int(self.sizes.sum())

    def validate(self, n_total: int) -> None:
        """Check the disjoint-cover, weight and non-empty invariants.

        Raises:
            InvalidArgumentError: If any invariant is violated.
        """
        if not self.assignments:
            raise InvalidArgumentError("a partition needs at least one client")
        if len(self.weights) != len(self.assignments):
            raise InvalidArgumentError("one weight per client is required")
        empty = [k for k, a in enumerate(self.assignments) if a.size == 0]
        if empty:
            raise InvalidArgumentError(f"clients {empty} hold no samples")
        union = np.concatenate(self.assignments)
        if union.size != n_total or not np.array_equal(np.sort(union), np.arange(n_total)):
            raise InvalidArgumentError(
                "client index lists must be disjoint and cover every sample exactly once"
            )
        if abs(float(np.sum(self.weights)) - 1.0) > WEIGHT_SUM_TOL:
            raise InvalidArgumentError(f"weights sum to {np.sum(self.weights)!r}, expected 1")

    def select(self, clients: Sequence[int]) -> "Partition":
        """Sub-partition restricted to ``clients``, with weights renormalized.

        Indices still refer to the original dataset, so the result does not
        cover ``0..n-1``; it is used for surrogate training over a coalition.
        """
        chosen = [self.assignments[k] for k in clients]
        if not chosen:
            raise InvalidArgumentError("cannot select an empty set of clients")
        sizes = np.array([a.size for a in chosen], dtype=np.float64)
        meta = dict(self.metadata)
        meta["selected_clients"] = [int(k) for k in clients]
        return Partition(chosen, sizes / sizes.sum(), meta)

    def to_dict(self) -> Dict[str, Any]:
        """Serialize to the JSON layout ``{"assignments", "weights", "metadata"}``."""
        return {
            "assignments": [a.tolist() for a in self.assignments],
            "weights": [float(w) for w in self.weights],
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "Partition":
        """Reconstruct a partition serialized by :meth:`to_dict`."""
        assignments = [np.asarray(a, dtype=np.int64) for a in d["assignments"]]
        return cls(assignments, np.asarray(d["weights"], dtype=np.float64), d.get("metadata", {}))


def label_histograms(labels: npt.NDArray[np.int64], partition: Partition, num_classes: int):
    """Per-client label counts, shape (N, num_classes)."""
    return np.stack([np.bincount(labels[a], minlength=num_classes) for a in partition.assignments])


def label_tv_distance(labels: npt.NDArray[np.int64], partition: Partition, num_classes: int) -> float:
    """Mean total-variation distance between client and global label distributions."""
    hist = label_histograms(labels, partition, num_classes).astype(np.float64)
    client_dist = hist / hist.sum(axis=1, keepdims=True)
    global_dist = hist.sum(axis=0) / hist.sum()
    return float(np.mean(0.5 * np.abs(client_dist - global_dist).sum(axis=1)))


def distinct_classes_per_client(
    labels: npt.NDArray[np.int64], partition: Partition
) -> List[int]:
    """Number of distinct labels held by each client."""
    return [int(np.unique(labels[a]).size) for a in partition.assignments]
