"""Forward pass, cross-entropy loss and exact gradients for every model kind.

Classifier kinds use the mean softmax cross-entropy over the batch. The
quadratic kind uses the label-free sum ``sum_x (x theta)^2``.
"""

import numpy as np
import numpy.typing as npt

from ..errors import ShapeMismatchError
from ..rng import derive_rng
from .networks import build_network
from .params import ParamVector
from .quadratic import quad_input_grad
from .spec import Batch, ModelKind, ModelSpec


def _check(spec: ModelSpec, params: ParamVector, features: np.ndarray) -> None:
    if len(params) != spec.num_params:
        raise ShapeMismatchError(
            f"{spec.kind.value} model needs {spec.num_params} parameters, got {len(params)}"
        )
    if features.ndim != 2 or features.shape[1] != spec.input_dim:
        raise ShapeMismatchError(
            f"features of shape {features.shape} do not match input_dim {spec.input_dim}"
        )


def _features(features: npt.ArrayLike) -> npt.NDArray[np.float64]:
    return np.atleast_2d(np.asarray(features, dtype=np.float64))


def log_softmax(logits: npt.NDArray[np.float64]) -> npt.NDArray[np.float64]:
    """Row-wise log-softmax with max-shift."""
    shifted = logits - logits.max(axis=1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=1, keepdims=True))


def init_params(spec: ModelSpec, seed: int) -> ParamVector:
    """Glorot-uniform weights, zero biases (standard normal theta for the quadratic kind)."""
    rng = derive_rng(seed, "init", spec.kind.value)
    if spec.kind is ModelKind.QUADRATIC:
        return ParamVector(rng.standard_normal(spec.input_dim), tuple(spec.layout()))
    tensors = build_network(spec).init_tensors(rng)
    return ParamVector.from_tensors(tensors, spec.layout())


def forward(spec: ModelSpec, params: ParamVector, features: npt.ArrayLike) -> np.ndarray:
    """Logits (m x num_classes), or the per-sample values ``(x theta)^2`` for the quadratic kind."""
    X = _features(features)
    _check(spec, params, X)
    if spec.kind is ModelKind.QUADRATIC:
        return (X @ params.values) ** 2
    logits, _ = build_network(spec).forward(params.tensors(), X)
    return logits


def predict(spec: ModelSpec, params: ParamVector, features: npt.ArrayLike) -> npt.NDArray[np.int64]:
    """Argmax class per row; ties go to the lowest class index."""
    return np.argmax(forward(spec, params, features), axis=1).astype(np.int64)


def per_sample_loss(spec: ModelSpec, params: ParamVector, batch: Batch) -> npt.NDArray[np.float64]:
    """Loss of each sample in the batch."""
    out = forward(spec, params, batch.features)
    if spec.kind is ModelKind.QUADRATIC:
        return out
    return -log_softmax(out)[np.arange(batch.size), batch.labels]


def loss(spec: ModelSpec, params: ParamVector, batch: Batch) -> float:
    """Mean cross-entropy over the batch (sum of squares for the quadratic kind)."""
    values = per_sample_loss(spec, params, batch)
    if spec.kind is ModelKind.QUADRATIC:
        return float(values.sum())
    return float(values.mean())


def _grad_logits(logits: np.ndarray, labels: np.ndarray, scale: float) -> np.ndarray:
    probs = np.exp(log_softmax(logits))
    probs[np.arange(labels.size), labels] -= 1.0
    return probs * scale


def loss_and_grad(spec: ModelSpec, params: ParamVector, batch: Batch):
    """``(loss, grad_params)`` from one forward/backward pass."""
    X = batch.features
    _check(spec, params, X)
    if spec.kind is ModelKind.QUADRATIC:
        r = X @ params.values
        return float(r @ r), params.with_values(2.0 * X.T @ r)
    net = build_network(spec)
    tensors = params.tensors()
    logits, cache = net.forward(tensors, X)
    value = float(-log_softmax(logits)[np.arange(batch.size), batch.labels].mean())
    grads, _ = net.backward(tensors, cache, _grad_logits(logits, batch.labels, 1.0 / batch.size))
    return value, ParamVector.from_tensors(grads, spec.layout())


def grad_params(spec: ModelSpec, params: ParamVector, batch: Batch) -> ParamVector:
    """Exact gradient of :func:`loss` w.r.t. every parameter."""
    return loss_and_grad(spec, params, batch)[1]


def grad_inputs(
    spec: ModelSpec, params: ParamVector, features: npt.ArrayLike, labels: npt.ArrayLike
) -> npt.NDArray[np.float64]:
    """Row i holds the gradient of sample i's own loss w.r.t. its features."""
    X = _features(features)
    y = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    _check(spec, params, X)
    if spec.kind is ModelKind.QUADRATIC:
        theta = params.values
        return 2.0 * (X @ theta)[:, None] * theta[None, :]
    net = build_network(spec)
    tensors = params.tensors()
    logits, cache = net.forward(tensors, X)
    _, grad_x = net.backward(tensors, cache, _grad_logits(logits, y, 1.0))
    return grad_x


def grad_input(
    spec: ModelSpec, params: ParamVector, x: npt.ArrayLike, y: int
) -> npt.NDArray[np.float64]:
    """Exact gradient of the single-sample loss w.r.t. the input features."""
    if spec.kind is ModelKind.QUADRATIC:
        return quad_input_grad(params.values, x)
    return grad_inputs(spec, params, np.asarray(x, dtype=np.float64)[None, :], [int(y)])[0]
