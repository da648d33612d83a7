"""PGD adversarial training."""

import itertools
from typing import Sequence

import numpy as np
import numpy.typing as npt

from ..model.params import ParamVector
from ..model.spec import Batch, ModelSpec
from ..model.training import DEFAULT_WEIGHT_DECAY, SGDTrainer
from ..rng import derive_rng
from .config import AttackConfig
from .gradient import pgd_rows


def adversarial_batch_transform(spec: ModelSpec, config: AttackConfig, seed: int):
    """Batch hook replacing features by PGD examples crafted against the current parameters.

    Random starts draw from streams tagged with a running minibatch counter, so
    the hook never touches the trainer's shuffling stream.
    """
    counter = itertools.count()

    def transform(params: ParamVector, batch: Batch) -> Batch:
        step = next(counter)
        rngs = None
        if config.random_start:
            rngs = [derive_rng(seed, "adv_train", step, i) for i in range(batch.size)]
        perturbed = pgd_rows(spec, params, batch.features, batch.labels, config, rngs)
        return Batch(perturbed, batch.labels)

    return transform


def adv_train_epochs(
    spec: ModelSpec,
    params: ParamVector,
    features: npt.NDArray[np.float64],
    labels: npt.NDArray[np.int64],
    indices: Sequence[int],
    config: AttackConfig,
    epochs: int,
    lr: float,
    batch_size: int,
    seed: int,
    weight_decay: float = DEFAULT_WEIGHT_DECAY,
    momentum: float = 0.0,
) -> ParamVector:
    """Like :func:`fedtransfer.model.training.sgd_epochs`, but every minibatch is
    replaced by its PGD perturbation before the gradient step.

    With ``config.epsilon = 0`` the trajectory equals plain SGD with the same seed.
    """
    trainer = SGDTrainer(spec, lr, batch_size, momentum=momentum, weight_decay=weight_decay)
    return trainer.run_epochs(
        params,
        features,
        labels,
        indices,
        epochs,
        derive_rng(seed, "sgd"),
        batch_transform=adversarial_batch_transform(spec, config, seed),
    )
