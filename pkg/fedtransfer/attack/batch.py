"""Crafting adversarial batches and persisting them."""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from ..data.dataset import Dataset
from ..errors import InvalidArgumentError, ShapeMismatchError
from ..model.functional import per_sample_loss
from ..model.params import ParamVector
from ..model.spec import Batch, ModelSpec
from ..rng import derive_rng
from .config import AdvExample, AttackConfig, AttackStats
from .gradient import pgd_rows

BLOB_DTYPE = "<f8"
# Rows crafted per vectorized PGD call.
CHUNK_ROWS = 256


@dataclass
class AdvBatch:
    """Adversarial examples aligned with ``indices`` of an evaluation dataset.

    Behaves as a sequence of :class:`AdvExample` while keeping the
    underlying matrices for vectorized scoring.
    """

    original: npt.NDArray[np.float64]
    perturbed: npt.NDArray[np.float64]
    labels: npt.NDArray[np.int64]
    indices: npt.NDArray[np.int64]
    loss_before: npt.NDArray[np.float64]
    loss_after: npt.NDArray[np.float64]
    config: AttackConfig

    def __post_init__(self) -> None:
        m = self.indices.shape[0]
        if self.original.shape != self.perturbed.shape or self.original.shape[0] != m:
            raise ShapeMismatchError("original, perturbed and indices disagree in length")
        if self.labels.shape != (m,):
            raise ShapeMismatchError(f"{m} examples but labels of shape {self.labels.shape}")

    def __len__(self) -> int:
        return int(self.indices.shape[0])

    def __getitem__(self, i: int) -> AdvExample:
        return AdvExample(
            self.original[i],
            self.perturbed[i],
            int(self.labels[i]),
            float(self.loss_before[i]),
            float(self.loss_after[i]),
            int(self.indices[i]),
        )

    def __iter__(self) -> Iterator[AdvExample]:
        for i in range(len(self)):
            yield self[i]

    def max_norm(self) -> float:
        """Largest perturbation size in the configured norm."""
        delta = self.perturbed - self.original
        if delta.size == 0:
            return 0.0
        if self.config.norm.value == "linf":
            return float(np.max(np.abs(delta)))
        return float(np.max(np.linalg.norm(delta, axis=1)))

    def stats(self) -> AttackStats:
        return AttackStats(
            count=len(self),
            mean_loss_before=float(np.mean(self.loss_before)),
            mean_loss_after=float(np.mean(self.loss_after)),
            loss_increased_fraction=float(np.mean(self.loss_after >= self.loss_before)),
            extra={"max_norm": self.max_norm()},
        )


def craft_batch(
    spec: ModelSpec,
    params: ParamVector,
    dataset: Dataset,
    indices: Sequence[int],
    config: AttackConfig,
) -> AdvBatch:
    """Craft one PGD example per index, in index order.

    The random start of the example for dataset row ``i`` draws from
    ``derive_rng(config.seed, "pgd", i)``, so results do not depend on
    chunking or ordering of the work.

    Raises:
        InvalidArgumentError: If ``indices`` is empty.
    """
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size == 0:
        raise InvalidArgumentError("cannot craft adversarial examples for an empty index set")
    original = dataset.features[idx]
    labels = dataset.labels[idx]
    perturbed = np.empty_like(original)
    for start in range(0, idx.size, CHUNK_ROWS):
        rows = slice(start, start + CHUNK_ROWS)
        rngs = None
        if config.random_start:
            rngs = [derive_rng(config.seed, "pgd", int(i)) for i in idx[rows]]
        perturbed[rows] = pgd_rows(spec, params, original[rows], labels[rows], config, rngs)
    before = per_sample_loss(spec, params, Batch(original, labels))
    after = per_sample_loss(spec, params, Batch(perturbed, labels))
    return AdvBatch(original, perturbed, labels, idx, before, after, config)


def _paths(path: Union[str, Path]) -> Tuple[Path, Path]:
    base = Path(path)
    return base.with_name(base.name + ".bin"), base.with_name(base.name + ".json")


def save_adv_batch(batch: AdvBatch, path: Union[str, Path]) -> Tuple[Path, Path]:
    """Write ``<path>.bin`` (original then perturbed, float64 LE) and a ``<path>.json`` manifest."""
    blob_path, manifest_path = _paths(path)
    blob_path.parent.mkdir(parents=True, exist_ok=True)
    blob = batch.original.astype(BLOB_DTYPE).tobytes() + batch.perturbed.astype(BLOB_DTYPE).tobytes()
    blob_path.write_bytes(blob)
    manifest = {
        "count": len(batch),
        "dim": int(batch.original.shape[1]),
        "dtype": "float64",
        "byte_order": "little",
        "indices": batch.indices.tolist(),
        "labels": batch.labels.tolist(),
        "loss_before": batch.loss_before.tolist(),
        "loss_after": batch.loss_after.tolist(),
        "attack": batch.config.to_dict(),
        "sha256": hashlib.sha256(blob).hexdigest(),
    }
    with open(manifest_path, "w", encoding="utf-8") as f:
        json.dump(manifest, f, indent=2)
    return blob_path, manifest_path


def load_adv_batch(path: Union[str, Path]) -> AdvBatch:
    """Load a batch written by :func:`save_adv_batch`."""
    blob_path, manifest_path = _paths(path)
    with open(manifest_path, encoding="utf-8") as f:
        manifest = json.load(f)
    values = np.frombuffer(blob_path.read_bytes(), dtype=BLOB_DTYPE).astype(np.float64)
    count, dim = manifest["count"], manifest["dim"]
    if values.size != 2 * count * dim:
        raise ShapeMismatchError(
            f"blob holds {values.size} values, manifest announces {2 * count * dim}"
        )
    original, perturbed = values.reshape(2, count, dim)
    return AdvBatch(
        original.copy(),
        perturbed.copy(),
        np.asarray(manifest["labels"], dtype=np.int64),
        np.asarray(manifest["indices"], dtype=np.int64),
        np.asarray(manifest["loss_before"], dtype=np.float64),
        np.asarray(manifest["loss_after"], dtype=np.float64),
        AttackConfig.from_dict(manifest["attack"]),
    )
