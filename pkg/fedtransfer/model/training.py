"""Minibatch SGD with optional momentum and weight decay."""

from typing import Callable, Optional, Sequence

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError
from ..rng import derive_rng
from .functional import loss_and_grad
from .params import ParamVector
from .spec import Batch, ModelSpec

# Hook replacing a minibatch before the gradient step (e.g. with adversarial inputs).
BatchTransform = Callable[[ParamVector, Batch], Batch]

DEFAULT_WEIGHT_DECAY = 1e-3


class SGDTrainer:
    """Stateful SGD optimizer for one model.

    The update is ``v = momentum * v + (g + weight_decay * theta)`` followed by
    ``theta = theta - lr * v``; with ``momentum = 0`` this is plain SGD with an
    additive weight-decay term. The velocity persists across calls to
    :meth:`run_epochs`, so a centralized trainer can call it epoch by epoch.
    """

    def __init__(
        self,
        spec: ModelSpec,
        lr: float,
        batch_size: int,
        momentum: float = 0.0,
        weight_decay: float = DEFAULT_WEIGHT_DECAY,
    ) -> None:
        if lr < 0:
            raise InvalidArgumentError(f"lr must be >= 0, got {lr}")
        if batch_size < 1:
            raise InvalidArgumentError(f"batch_size must be >= 1, got {batch_size}")
        if not 0.0 <= momentum < 1.0:
            raise InvalidArgumentError(f"momentum must be in [0, 1), got {momentum}")
        if weight_decay < 0:
            raise InvalidArgumentError(f"weight_decay must be >= 0, got {weight_decay}")
        self.spec = spec
        self.lr = float(lr)
        self.batch_size = int(batch_size)
        self.momentum = float(momentum)
        self.weight_decay = float(weight_decay)
        self._velocity: Optional[np.ndarray] = None
        self.last_losses = []

    def step(self, params: ParamVector, batch: Batch) -> ParamVector:
        """Apply one update on ``batch`` and return the new parameters."""
        value, grad = loss_and_grad(self.spec, params, batch)
        self.last_losses.append(value)
        theta = params.values
        direction = grad.values + self.weight_decay * theta
        if self.momentum > 0.0:
            if self._velocity is None:
                self._velocity = np.zeros_like(theta)
            self._velocity = self.momentum * self._velocity + direction
            direction = self._velocity
        return params.with_values(theta - self.lr * direction)

    def run_epochs(
        self,
        params: ParamVector,
        features: npt.NDArray[np.float64],
        labels: npt.NDArray[np.int64],
        indices: Sequence[int],
        epochs: int,
        rng: np.random.Generator,
        batch_transform: Optional[BatchTransform] = None,
    ) -> ParamVector:
        """Run ``epochs`` passes over ``indices``, reshuffled every epoch from ``rng``.

        The last minibatch of an epoch may be smaller than ``batch_size``.
        """
        idx = np.asarray(indices, dtype=np.int64)
        if idx.size == 0:
            raise InvalidArgumentError("cannot train on an empty index set")
        if epochs < 1:
            raise InvalidArgumentError(f"epochs must be >= 1, got {epochs}")
        self.last_losses = []
        for _ in range(epochs):
            order = idx[rng.permutation(idx.size)]
            for start in range(0, order.size, self.batch_size):
                rows = order[start : start + self.batch_size]
                batch = Batch(features[rows], labels[rows])
                if batch_transform is not None:
                    batch = batch_transform(params, batch)
                params = self.step(params, batch)
        return params

    @property
    def mean_loss(self) -> float:
        """Mean minibatch loss of the last :meth:`run_epochs` call."""
        return float(np.mean(self.last_losses)) if self.last_losses else float("nan")


def sgd_epochs(
    spec: ModelSpec,
    params: ParamVector,
    features: npt.NDArray[np.float64],
    labels: npt.NDArray[np.int64],
    indices: Sequence[int],
    epochs: int,
    lr: float,
    batch_size: int,
    seed: int,
    weight_decay: float = DEFAULT_WEIGHT_DECAY,
    momentum: float = 0.0,
) -> ParamVector:
    """Train a copy of ``params`` for ``epochs`` epochs of minibatch SGD.

    Args:
        spec: Model architecture.
        params: Starting parameters (not modified).
        features: Full feature matrix the indices refer to.
        labels: Full label vector.
        indices: Training rows.
        epochs: Number of passes (>= 1).
        lr: Learning rate (>= 0).
        batch_size: Minibatch size.
        seed: Seed of the shuffling stream.
        weight_decay: Coefficient of the additive ``lambda * theta`` term.
        momentum: Heavy-ball momentum (0 for plain SGD).

    Returns:
        Updated parameters.
    """
    trainer = SGDTrainer(spec, lr, batch_size, momentum=momentum, weight_decay=weight_decay)
    return trainer.run_epochs(
        params, features, labels, indices, epochs, derive_rng(seed, "sgd")
    )
