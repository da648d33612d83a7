"""Tests for the federated and centralized training loops."""

import numpy as np
import pytest

from fedtransfer.aggregation import AggregationRule
from fedtransfer.attack import AttackConfig
from fedtransfer.data import Partition, make_synthetic, partition_dirichlet, partition_iid
from fedtransfer.errors import InvalidArgumentError
from fedtransfer.federated import (
    FedConfig,
    default_clients_per_round,
    evaluate,
    sample_clients,
    train_centralized,
    train_federated,
)
from fedtransfer.model import ModelSpec, ParamVector, init_params, predict

SPEC = ModelSpec(kind="softmax_linear", input_dim=6, num_classes=3)


@pytest.fixture(scope="module")
def blobs():
    return make_synthetic(num_classes=3, samples_per_class=40, dim=6, class_separation=8.0, seed=3)


def test_default_participation_is_ten_percent():
    """K defaults to max(1, round(0.1 N))."""
    assert default_clients_per_round(100) == 10
    assert default_clients_per_round(5) == 1
    assert FedConfig().resolve_clients_per_round(30) == 3


def test_clients_per_round_cannot_exceed_clients():
    config = FedConfig(clients_per_round=8)
    with pytest.raises(InvalidArgumentError):
        config.resolve_clients_per_round(5)


def test_robust_rule_needs_enough_clients():
    """Krum with f = 2 needs more than f + 2 updates per round."""
    config = FedConfig(clients_per_round=3, rule=AggregationRule(kind="krum", byzantine_f=2))
    with pytest.raises(InvalidArgumentError):
        config.resolve_clients_per_round(10)


def test_fed_config_roundtrips_through_dict():
    config = FedConfig(
        rounds=7,
        clients_per_round=4,
        rule=AggregationRule(kind="trimmed_mean", trim_beta=1),
        adversarial_training=AttackConfig(epsilon=0.1, steps=3),
        checkpoint_rounds=(2, 5),
    )
    restored = FedConfig.from_dict(config.to_dict())
    assert restored == config, "from_dict(to_dict()) should reproduce the config"


def test_sample_clients_sorted_distinct_and_seeded():
    a = sample_clients(20, 5, seed=9, round_=3)
    b = sample_clients(20, 5, seed=9, round_=3)
    c = sample_clients(20, 5, seed=9, round_=4)
    assert np.array_equal(a, b)
    assert len(set(a.tolist())) == 5
    assert np.all(np.diff(a) > 0), "sampled ids should be sorted ascending"


def test_evaluate_counts_argmax_hits(blobs):
    params = init_params(SPEC, seed=0)
    expected = float(np.mean(predict(SPEC, params, blobs.features) == blobs.labels))
    assert evaluate(SPEC, params, blobs) == pytest.approx(expected)
    with pytest.raises(InvalidArgumentError):
        evaluate(SPEC, params, blobs, indices=[])


def test_fedavg_full_participation_matches_full_batch_gd(blobs):
    """One full-batch local step per client with all clients reduces to centralized GD."""
    n = blobs.n
    partition = partition_iid(blobs, 4, seed=1)
    config = FedConfig(
        rounds=10,
        clients_per_round=4,
        local_epochs=1,
        lr=0.2,
        batch_size=n,
        weight_decay=1e-3,
        eval_every=10,
    )
    fed_params, _ = train_federated(SPEC, blobs, partition, config, None, seed=5)
    central_params, _ = train_centralized(
        SPEC,
        blobs,
        np.arange(n),
        epochs=10,
        lr=0.2,
        batch_size=n,
        momentum=0.0,
        weight_decay=1e-3,
        seed=5,
        eval_every=10,
    )
    assert np.allclose(fed_params.values, central_params.values, atol=1e-10, rtol=0), (
        "FedAvg with full participation and one full-batch step should equal gradient descent"
    )


@pytest.mark.parametrize(
    "rule",
    [
        AggregationRule(kind="fedavg"),
        AggregationRule(kind="krum", byzantine_f=1),
        AggregationRule(kind="median"),
        AggregationRule(kind="geometric_median"),
    ],
)
def test_zero_learning_rate_keeps_initial_params(blobs, rule):
    partition = partition_iid(blobs, 6, seed=0)
    config = FedConfig(rounds=3, clients_per_round=4, lr=0.0, rule=rule, eval_every=1)
    init = init_params(SPEC, seed=11)
    params, _ = train_federated(SPEC, blobs, partition, config, None, seed=11)
    assert np.array_equal(params.values, init.values), "lr = 0 must leave the model untouched"


def test_training_is_deterministic_for_a_seed(blobs):
    partition = partition_dirichlet(blobs, 6, alpha=0.5, seed=2)
    config = FedConfig(rounds=4, clients_per_round=3, lr=0.1, batch_size=8, eval_every=2)
    a, hist_a = train_federated(SPEC, blobs, partition, config, None, seed=4)
    b, hist_b = train_federated(SPEC, blobs, partition, config, None, seed=4)
    assert np.array_equal(a.values, b.values)
    assert hist_a.to_dict() == hist_b.to_dict()


def test_client_workers_do_not_change_the_result(blobs):
    """Aggregation happens in client-id order whatever the completion order."""
    partition = partition_iid(blobs, 6, seed=2)
    serial = FedConfig(rounds=3, clients_per_round=4, batch_size=10, eval_every=3)
    threaded = FedConfig(rounds=3, clients_per_round=4, batch_size=10, eval_every=3, client_workers=4)
    a, _ = train_federated(SPEC, blobs, partition, serial, None, seed=8)
    b, _ = train_federated(SPEC, blobs, partition, threaded, None, seed=8)
    assert np.array_equal(a.values, b.values)


def test_history_follows_eval_cadence(blobs, tmp_path):
    partition = partition_iid(blobs, 4, seed=0)
    config = FedConfig(rounds=7, clients_per_round=2, batch_size=10, eval_every=3, checkpoint_rounds=(2,))
    _, history = train_federated(SPEC, blobs, partition, config, blobs, seed=0)
    assert [r.round for r in history.records] == [3, 6, 7], "evaluate every 3 rounds and at the end"
    assert history.stop_round == 7 and not history.stopped_early
    assert list(history.checkpoints) == [2]
    assert isinstance(history.checkpoints[2], ParamVector)

    csv_path = tmp_path / "history.csv"
    history.save_csv(csv_path)
    assert csv_path.read_text().splitlines()[0] == "round,accuracy,mean_loss"


def test_early_stop_on_target_accuracy(blobs):
    partition = partition_iid(blobs, 4, seed=0)
    config = FedConfig(
        rounds=50, clients_per_round=4, lr=0.5, batch_size=10, eval_every=1, early_stop_acc=0.0
    )
    _, history = train_federated(SPEC, blobs, partition, config, None, seed=0)
    assert history.stop_round == 1 and history.stopped_early


def test_separable_blobs_reach_high_accuracy(blobs):
    partition = partition_iid(blobs, 5, seed=0)
    config = FedConfig(rounds=30, clients_per_round=5, lr=0.5, batch_size=8, weight_decay=0.0, eval_every=10)
    params, history = train_federated(SPEC, blobs, partition, config, None, seed=0)
    assert evaluate(SPEC, params, blobs) >= 0.95, f"accuracy history: {history.to_dict()}"


def test_same_seed_gives_same_initialization_for_target_and_surrogate(blobs):
    """Federated and centralized runs start from init_params(spec, seed)."""
    partition = Partition.from_assignments([np.arange(blobs.n)], blobs.n)
    config = FedConfig(rounds=1, clients_per_round=1, lr=0.0, eval_every=1)
    fed, _ = train_federated(SPEC, blobs, partition, config, None, seed=21)
    central, _ = train_centralized(SPEC, blobs, np.arange(blobs.n), epochs=1, lr=0.0, seed=21)
    assert np.array_equal(fed.values, central.values)


def test_centralized_training_rejects_empty_indices(blobs):
    with pytest.raises(InvalidArgumentError):
        train_centralized(SPEC, blobs, [], epochs=1)


def test_centralized_momentum_sgd_learns(blobs):
    params, history = train_centralized(
        SPEC, blobs, np.arange(blobs.n), epochs=20, lr=0.1, batch_size=16, seed=1, eval_every=5
    )
    assert [r.round for r in history.records] == [5, 10, 15, 20]
    assert evaluate(SPEC, params, blobs) >= 0.95


def test_adversarial_clients_with_zero_radius_match_plain_clients(blobs):
    partition = partition_iid(blobs, 4, seed=0)
    plain = FedConfig(rounds=2, clients_per_round=2, batch_size=10, eval_every=2)
    adv = FedConfig(
        rounds=2,
        clients_per_round=2,
        batch_size=10,
        eval_every=2,
        adversarial_training=AttackConfig(epsilon=0.0, steps=2),
    )
    a, _ = train_federated(SPEC, blobs, partition, plain, None, seed=3)
    b, _ = train_federated(SPEC, blobs, partition, adv, None, seed=3)
    assert np.array_equal(a.values, b.values)
