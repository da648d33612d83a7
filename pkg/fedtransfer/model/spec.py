"""Model descriptions and minibatches."""

import enum
from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError, ShapeMismatchError

Layout = List[Tuple[str, Tuple[int, ...]]]


class ModelKind(str, enum.Enum):
    """Supported model families.

    ``QUADRATIC`` is the scalar theory model ``f(theta) = sum_x (x theta)^2``;
    it has a parameter layout but is not a classifier.
    """

    SOFTMAX_LINEAR = "softmax_linear"
    MLP = "mlp"
    QUADRATIC = "quadratic"


@dataclass(frozen=True)
class ModelSpec:
    """Architecture of a model; the kind and dimensions fix the parameter layout."""

    kind: ModelKind = ModelKind.SOFTMAX_LINEAR
    input_dim: int = 20
    num_classes: int = 10
    hidden_dims: Tuple[int, ...] = field(default_factory=tuple)
    activation: str = "relu"

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ModelKind(self.kind))
        object.__setattr__(self, "hidden_dims", tuple(int(h) for h in self.hidden_dims))
        if self.input_dim < 1:
            raise InvalidArgumentError(f"input_dim must be positive, got {self.input_dim}")
        if self.kind is not ModelKind.QUADRATIC and self.num_classes < 2:
            raise InvalidArgumentError(f"num_classes must be >= 2, got {self.num_classes}")
        if any(h < 1 for h in self.hidden_dims):
            raise InvalidArgumentError(f"hidden_dims must be positive, got {self.hidden_dims}")
        if self.kind is ModelKind.SOFTMAX_LINEAR and self.hidden_dims:
            raise InvalidArgumentError("softmax_linear takes no hidden layers")
        if self.kind is ModelKind.MLP and not self.hidden_dims:
            raise InvalidArgumentError("mlp needs at least one hidden layer")
        if self.activation != "relu":
            raise InvalidArgumentError(f"Unknown activation '{self.activation}'. Available: relu")

    def layout(self) -> Layout:
        """Ordered (name, shape) pairs of the flat parameter vector."""
        if self.kind is ModelKind.QUADRATIC:
            return [("theta", (self.input_dim,))]
        dims = [self.input_dim, *self.hidden_dims, self.num_classes]
        layout: Layout = []
        for i, (fan_in, fan_out) in enumerate(zip(dims, dims[1:])):
            layout.append((f"W{i}", (fan_in, fan_out)))
            layout.append((f"b{i}", (fan_out,)))
        return layout

    @property
    def num_params(self) -> int:
        return int(sum(np.prod(shape) for _, shape in self.layout()))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "input_dim": self.input_dim,
            "num_classes": self.num_classes,
            "hidden_dims": list(self.hidden_dims),
            "activation": self.activation,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ModelSpec":
        d = dict(d)
        d["hidden_dims"] = tuple(d.get("hidden_dims", ()))
        return cls(**d)


@dataclass
class Batch:
    """A minibatch of m samples."""

    features: npt.NDArray[np.float64]
    labels: npt.NDArray[np.int64]

    def __post_init__(self) -> None:
        self.features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        self.labels = np.atleast_1d(np.asarray(self.labels, dtype=np.int64))
        if self.features.shape[0] < 1:
            raise InvalidArgumentError("a batch needs at least one sample")
        if self.labels.shape != (self.features.shape[0],):
            raise ShapeMismatchError(
                f"{self.features.shape[0]} feature rows but labels of shape {self.labels.shape}"
            )

    @property
    def size(self) -> int:
        return int(self.features.shape[0])

    @classmethod
    def of(cls, features: Sequence, labels: Sequence) -> "Batch":
        return cls(np.asarray(features, dtype=np.float64), np.asarray(labels, dtype=np.int64))
