"""Fully connected ReLU network."""

from typing import Any, List, Tuple

import numpy as np
import numpy.typing as npt

from .base import Network, Tensors


class MLP(Network):
    """Hidden layers ``h = relu(h @ Wi + bi)`` followed by a linear output layer."""

    name: str = "mlp"

    @property
    def num_layers(self) -> int:
        return len(self.spec.hidden_dims) + 1

    def forward(self, tensors: Tensors, features: npt.NDArray[np.float64]) -> Tuple[np.ndarray, Any]:
        inputs: List[np.ndarray] = []
        pre_activations: List[np.ndarray] = []
        h = features
        for i in range(self.num_layers):
            inputs.append(h)
            z = h @ tensors[f"W{i}"] + tensors[f"b{i}"]
            if i < self.num_layers - 1:
                pre_activations.append(z)
                h = np.maximum(z, 0.0)
            else:
                h = z
        return h, (inputs, pre_activations)

    def backward(self, tensors: Tensors, cache: Any, grad_logits: npt.NDArray[np.float64]):
        inputs, pre_activations = cache
        grads = {}
        grad = grad_logits
        for i in reversed(range(self.num_layers)):
            if i < self.num_layers - 1:
                # relu'(0) = 0
                grad = grad * (pre_activations[i] > 0.0)
            grads[f"W{i}"] = inputs[i].T @ grad
            grads[f"b{i}"] = grad.sum(axis=0)
            grad = grad @ tensors[f"W{i}"].T
        return grads, grad
