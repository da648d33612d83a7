"""Federated training loop: sample clients, train locally, aggregate."""

from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Tuple

import numpy as np

from ..aggregation.rule import aggregate
from ..attack.adversarial_training import adversarial_batch_transform
from ..data.dataset import Dataset
from ..data.partition import Partition
from ..logging_utils import get_logger
from ..model.functional import init_params
from ..model.params import ParamVector
from ..model.spec import ModelSpec
from ..model.training import SGDTrainer
from ..rng import derive_rng, derive_seed
from .config import FedConfig
from .evaluation import evaluate
from .history import TrainHistory

logger = get_logger(__name__)


def sample_clients(num_clients: int, k: int, seed: int, round_: int) -> np.ndarray:
    """K distinct client ids drawn uniformly without replacement, sorted ascending."""
    rng = derive_rng(seed, "fed", "sample", round_)
    return np.sort(rng.choice(num_clients, size=k, replace=False))


def client_update(
    spec: ModelSpec,
    global_params: ParamVector,
    dataset: Dataset,
    indices: np.ndarray,
    config: FedConfig,
    seed: int,
) -> Tuple[ParamVector, float]:
    """Run the local epochs of one client from the current global parameters.

    Clients train with plain SGD, or with PGD adversarial training when
    ``config.adversarial_training`` is set.

    Returns:
        ``(updated parameters, mean minibatch loss)``.
    """
    trainer = SGDTrainer(
        spec, config.lr, config.batch_size, momentum=config.momentum, weight_decay=config.weight_decay
    )
    transform = None
    if config.adversarial_training is not None:
        transform = adversarial_batch_transform(spec, config.adversarial_training, seed)
    params = trainer.run_epochs(
        global_params,
        dataset.features,
        dataset.labels,
        indices,
        config.local_epochs,
        derive_rng(seed, "sgd"),
        batch_transform=transform,
    )
    return params, trainer.mean_loss


def train_federated(
    spec: ModelSpec,
    dataset: Dataset,
    partition: Partition,
    config: FedConfig,
    eval_set: Optional[Dataset],
    seed: int,
    init: Optional[ParamVector] = None,
) -> Tuple[ParamVector, TrainHistory]:
    """Train a global model over ``partition`` with the configured aggregation rule.

    Each round samples K clients without replacement, runs their local
    training from the current global parameters (possibly on a thread pool,
    results collected in client-id order) and aggregates the client deltas
    ``theta_k - theta`` with the rule. Accuracy is evaluated every
    ``eval_every`` rounds and at the last round; training stops early once it
    reaches ``early_stop_acc``.

    Args:
        spec: Model architecture.
        dataset: Training data the partition refers to.
        partition: Client index lists and weights.
        config: Federated settings.
        eval_set: Held-out data for evaluation (training data when None).
        seed: Seed of initialization, client sampling and local shuffling.
        init: Starting parameters (``init_params(spec, seed)`` when None).

    Returns:
        ``(final global parameters, history)``.
    """
    k = config.resolve_clients_per_round(partition.num_clients)
    params = init if init is not None else init_params(spec, seed)
    eval_data = eval_set if eval_set is not None else dataset
    history = TrainHistory()
    logger.info(
        "Federated training: %d rounds, %d of %d clients per round, rule=%s",
        config.rounds,
        k,
        partition.num_clients,
        config.rule.kind.value,
    )

    with ThreadPoolExecutor(max_workers=config.client_workers) as pool:
        for round_ in range(1, config.rounds + 1):
            selected = sample_clients(partition.num_clients, k, seed, round_)
            futures = [
                pool.submit(
                    client_update,
                    spec,
                    params,
                    dataset,
                    partition.assignments[c],
                    config,
                    derive_seed(seed, "fed", "client", round_, int(c)),
                )
                for c in selected
            ]
            results: List[Tuple[ParamVector, float]] = [f.result() for f in futures]
            weights = partition.weights[selected]
            weights = weights / weights.sum()
            deltas = [p.values - params.values for p, _ in results]
            step = aggregate(config.rule, deltas, weights)
            params = params.with_values(params.values + step)

            if round_ in config.checkpoint_rounds:
                history.checkpoints[round_] = params
            history.stop_round = round_
            if round_ % config.eval_every == 0 or round_ == config.rounds:
                accuracy = evaluate(spec, params, eval_data)
                losses = [loss for _, loss in results]
                mean_loss = float(np.mean(losses))
                history.add(round_, accuracy, mean_loss)
                logger.info("Round %d/%d: accuracy=%.4f", round_, config.rounds, accuracy)
                if config.early_stop_acc is not None and accuracy >= config.early_stop_acc:
                    history.stopped_early = round_ < config.rounds
                    logger.info("Reached accuracy %.4f at round %d, stopping", accuracy, round_)
                    break
    return params, history
