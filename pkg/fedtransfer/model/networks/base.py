"""Base interface for differentiable classifiers."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Tuple

import numpy as np
import numpy.typing as npt

from ..spec import ModelSpec

Tensors = Dict[str, npt.NDArray[np.float64]]


class Network(ABC):
    """A classifier with exact manual backpropagation.

    ``forward`` returns the logits and an opaque cache; ``backward`` turns the
    gradient of a scalar objective w.r.t. the logits into gradients w.r.t.
    every parameter tensor and w.r.t. the input rows.
    """

    name: str = "base"

    def __init__(self, spec: ModelSpec) -> None:
        self.spec = spec

    @abstractmethod
    def forward(self, tensors: Tensors, features: npt.NDArray[np.float64]) -> Tuple[np.ndarray, Any]:
        """Compute ``(logits, cache)`` for an m x p feature matrix."""
        ...

    @abstractmethod
    def backward(
        self, tensors: Tensors, cache: Any, grad_logits: npt.NDArray[np.float64]
    ) -> Tuple[Tensors, npt.NDArray[np.float64]]:
        """Return ``(parameter gradients, input gradients)`` for ``grad_logits``."""
        ...

    def init_tensors(self, rng: np.random.Generator) -> Tensors:
        """Glorot-uniform weights and zero biases."""
        tensors = {}
        for name, shape in self.spec.layout():
            if len(shape) == 2:
                limit = np.sqrt(6.0 / (shape[0] + shape[1]))
                tensors[name] = rng.uniform(-limit, limit, size=shape)
            else:
                tensors[name] = np.zeros(shape)
        return tensors
