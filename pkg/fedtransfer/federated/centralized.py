"""Centralized momentum-SGD training (baseline and surrogate models)."""

from typing import Optional, Sequence, Tuple

import numpy as np

from ..data.dataset import Dataset
from ..errors import InvalidArgumentError
from ..logging_utils import get_logger
from ..model.functional import init_params
from ..model.params import ParamVector
from ..model.spec import ModelSpec
from ..model.training import DEFAULT_WEIGHT_DECAY, SGDTrainer
from ..rng import derive_rng
from .evaluation import evaluate
from .history import TrainHistory

logger = get_logger(__name__)


def train_centralized(
    spec: ModelSpec,
    dataset: Dataset,
    indices: Sequence[int],
    epochs: int,
    lr: float = 0.01,
    batch_size: int = 64,
    momentum: float = 0.9,
    weight_decay: float = DEFAULT_WEIGHT_DECAY,
    early_stop_acc: Optional[float] = None,
    eval_set: Optional[Dataset] = None,
    seed: int = 0,
    eval_every: int = 1,
    init: Optional[ParamVector] = None,
) -> Tuple[ParamVector, TrainHistory]:
    """Train on ``dataset[indices]`` with one persistent momentum-SGD optimizer.

    Minibatches are reshuffled every epoch. Accuracy on ``eval_set`` (the
    training rows when None) is recorded every ``eval_every`` epochs and after
    the last one; training stops once it reaches ``early_stop_acc``.

    Raises:
        InvalidArgumentError: If ``indices`` is empty or ``epochs < 1``.
    """
    idx = np.asarray(indices, dtype=np.int64)
    if idx.size == 0:
        raise InvalidArgumentError("cannot train on an empty index set")
    if epochs < 1:
        raise InvalidArgumentError(f"epochs must be >= 1, got {epochs}")
    params = init if init is not None else init_params(spec, seed)
    trainer = SGDTrainer(spec, lr, batch_size, momentum=momentum, weight_decay=weight_decay)
    rng = derive_rng(seed, "central", "sgd")
    history = TrainHistory()

    for epoch in range(1, epochs + 1):
        params = trainer.run_epochs(params, dataset.features, dataset.labels, idx, 1, rng)
        history.stop_round = epoch
        if epoch % eval_every == 0 or epoch == epochs:
            if eval_set is not None:
                accuracy = evaluate(spec, params, eval_set)
            else:
                accuracy = evaluate(spec, params, dataset, idx)
            history.add(epoch, accuracy, trainer.mean_loss)
            logger.debug("Epoch %d/%d: accuracy=%.4f", epoch, epochs, accuracy)
            if early_stop_acc is not None and accuracy >= early_stop_acc:
                history.stopped_early = epoch < epochs
                break
    logger.info(
        "Centralized training on %d samples finished after %d epochs (accuracy %.4f)",
        idx.size,
        history.stop_round,
        history.last_accuracy,
    )
    return params, history
