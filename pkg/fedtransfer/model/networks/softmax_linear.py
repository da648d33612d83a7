"""Multinomial logistic regression."""

from typing import Any, Tuple

import numpy as np
import numpy.typing as npt

from .base import Network, Tensors


class SoftmaxLinear(Network):
    """``logits = X @ W0 + b0``."""

    name: str = "softmax_linear"

    def forward(self, tensors: Tensors, features: npt.NDArray[np.float64]) -> Tuple[np.ndarray, Any]:
        return features @ tensors["W0"] + tensors["b0"], features

    def backward(self, tensors: Tensors, cache: Any, grad_logits: npt.NDArray[np.float64]):
        features = cache
        grads = {"W0": features.T @ grad_logits, "b0": grad_logits.sum(axis=0)}
        return grads, grad_logits @ tensors["W0"].T
