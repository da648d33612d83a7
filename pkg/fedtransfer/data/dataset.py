"""In-memory classification datasets and the synthetic blob generator."""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError, ShapeMismatchError
from ..rng import derive_rng

# Per-feature clipping radius (in noise standard deviations) before min-max rescaling.
CLIP_SIGMAS = 4.0


@dataclass
class Dataset:
    """Feature matrix, integer labels and the number of classes.

    Features are float64 in [0, 1]; labels are int64 in [0, num_classes).
    """

    features: npt.NDArray[np.float64]
    labels: npt.NDArray[np.int64]
    num_classes: int
    name: str = field(default="dataset", compare=False)

    def __post_init__(self) -> None:
        self.features = np.ascontiguousarray(self.features, dtype=np.float64)
        self.labels = np.ascontiguousarray(self.labels, dtype=np.int64)
        if self.features.ndim != 2:
            raise ShapeMismatchError(
                f"features must be an n x p matrix, got shape {self.features.shape}"
            )
        if self.labels.shape != (self.features.shape[0],):
            raise ShapeMismatchError(
                f"labels shape {self.labels.shape} does not match "
                f"{self.features.shape[0]} feature rows"
            )
        if self.features.shape[0] < 1:
            raise InvalidArgumentError("a dataset needs at least one sample")
        if self.num_classes < 1:
            raise InvalidArgumentError(f"num_classes must be positive, got {self.num_classes}")
        if self.labels.min() < 0 or self.labels.max() >= self.num_classes:
            raise InvalidArgumentError(
                f"labels must lie in [0, {self.num_classes}), "
                f"got range [{self.labels.min()}, {self.labels.max()}]"
            )
        if not np.all(np.isfinite(self.features)):
            raise InvalidArgumentError("features must be finite")
        if self.features.min() < 0.0 or self.features.max() > 1.0:
            raise InvalidArgumentError("features must lie in [0, 1]")

    @property
    def n(self) -> int:
        """Number of samples."""
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        """Number of features per sample."""
        return int(self.features.shape[1])

    def subset(self, indices: Union[Sequence[int], npt.NDArray[np.int64]]) -> "Dataset":
        """Return a new dataset holding the rows at ``indices`` (in that order)."""
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size == 0:
            raise InvalidArgumentError("cannot take an empty subset")
        return Dataset(self.features[idx], self.labels[idx], self.num_classes, self.name)

    def class_counts(self) -> npt.NDArray[np.int64]:
        """Number of samples per class."""
        return np.bincount(self.labels, minlength=self.num_classes)


def _simplex_means(num_classes: int, dim: int, separation: float, rng: np.random.Generator):
    # Vertices of the regular simplex e_c - 1/C have pairwise distance sqrt(2).
    vertices = np.eye(num_classes) - 1.0 / num_classes
    if dim >= num_classes:
        embedded = np.zeros((num_classes, dim))
        embedded[:, :num_classes] = vertices
    else:
        basis, _ = np.linalg.qr(rng.standard_normal((num_classes, dim)))
        embedded = vertices @ basis
    return embedded * (separation / np.sqrt(2.0))


def make_synthetic(
    num_classes: int,
    samples_per_class: int,
    dim: int,
    class_separation: float,
    seed: int,
) -> Dataset:
    """Generate Gaussian blobs with one mean per class on a scaled simplex.

    Unit-variance noise is added around each mean, features are clipped to
    ``CLIP_SIGMAS`` noise deviations beyond the extreme means and min-max
    rescaled per feature into [0, 1]. Samples are ordered class by class.

    Args:
        num_classes: Number of classes (>= 2).
        samples_per_class: Samples drawn per class (>= 1).
        dim: Feature dimension (>= 2).
        class_separation: Distance between class means before rescaling.
        seed: Seed of the generator.

    Returns:
        Deterministic Dataset for the given arguments.

    Raises:
        InvalidArgumentError: On non-positive sizes or out-of-range arguments.
    """
    if num_classes < 2:
        raise InvalidArgumentError(f"num_classes must be >= 2, got {num_classes}")
    if samples_per_class < 1:
        raise InvalidArgumentError(f"samples_per_class must be >= 1, got {samples_per_class}")
    if dim < 2:
        raise InvalidArgumentError(f"dim must be >= 2, got {dim}")
    if class_separation < 0:
        raise InvalidArgumentError(f"class_separation must be >= 0, got {class_separation}")

    rng = derive_rng(seed, "synthetic")
    means = _simplex_means(num_classes, dim, class_separation, rng)
    labels = np.repeat(np.arange(num_classes, dtype=np.int64), samples_per_class)
    noise = rng.standard_normal((labels.size, dim))
    raw = means[labels] + noise

    lo = means.min(axis=0) - CLIP_SIGMAS
    hi = means.max(axis=0) + CLIP_SIGMAS
    raw = np.clip(raw, lo, hi)
    fmin = raw.min(axis=0)
    span = raw.max(axis=0) - fmin
    safe_span = np.where(span > 0, span, 1.0)
    features = np.clip((raw - fmin) / safe_span, 0.0, 1.0)
    return Dataset(features, labels, num_classes, name="synthetic")


def train_eval_split(
    dataset: Dataset, eval_fraction: float, seed: int
) -> Tuple[Dataset, Dataset]:
    """Split a dataset into disjoint shuffled training and evaluation parts.

    Args:
        dataset: Dataset to split.
        eval_fraction: Fraction of samples held out, in (0, 1).
        seed: Seed of the shuffling stream.

    Returns:
        ``(train, eval)`` datasets; the evaluation part keeps at least one sample
        and the training part keeps at least one sample.
    """
    if not 0.0 < eval_fraction < 1.0:
        raise InvalidArgumentError(f"eval_fraction must be in (0, 1), got {eval_fraction}")
    if dataset.n < 2:
        raise InvalidArgumentError("need at least two samples to split")
    order = derive_rng(seed, "split").permutation(dataset.n)
    n_eval = int(round(eval_fraction * dataset.n))
    n_eval = min(max(n_eval, 1), dataset.n - 1)
    eval_idx = np.sort(order[:n_eval])
    train_idx = np.sort(order[n_eval:])
    return dataset.subset(train_idx), dataset.subset(eval_idx)


def build_dataset(
    source: str = "synthetic",
    *,
    seed: int = 0,
    num_classes: int = 10,
    samples_per_class: int = 100,
    dim: int = 20,
    class_separation: float = 3.0,
    images_path: Optional[str] = None,
    labels_path: Optional[str] = None,
) -> Dataset:
    """Build a dataset from a source name ("synthetic" or "idx")."""
    if source == "synthetic":
        return make_synthetic(num_classes, samples_per_class, dim, class_separation, seed)
    if source == "idx":
        from .idx import load_idx

        if images_path is None or labels_path is None:
            raise InvalidArgumentError("idx datasets need images_path and labels_path")
        return load_idx(images_path, labels_path)
    raise InvalidArgumentError(f"Unknown dataset source '{source}'. Available: synthetic, idx")
