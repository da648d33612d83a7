"""Datasets, IDX files and client partitioning."""

from .controls import (
    HeterogeneityControls,
    PartitionScheme,
    partition_dirichlet,
    partition_iid,
    partition_max_classes,
    partition_unbalanced,
)
from .dataset import Dataset, build_dataset, make_synthetic, train_eval_split
from .idx import load_idx, write_idx
from .io import load_partition, save_partition
from .partition import Partition, distinct_classes_per_client, label_tv_distance
from .partitioners import PARTITIONER_REGISTRY, Partitioner

__all__ = [
    "Dataset",
    "make_synthetic",
    "train_eval_split",
    "build_dataset",
    "load_idx",
    "write_idx",
    "Partition",
    "label_tv_distance",
    "distinct_classes_per_client",
    "HeterogeneityControls",
    "PartitionScheme",
    "partition_iid",
    "partition_dirichlet",
    "partition_unbalanced",
    "partition_max_classes",
    "save_partition",
    "load_partition",
    "PARTITIONER_REGISTRY",
    "Partitioner",
]
