"""Tests for model kinds, exact gradients, SGD and the quadratic family."""

import numpy as np
import pytest

from fedtransfer.attack import AttackConfig, adv_train_epochs
from fedtransfer.data import make_synthetic
from fedtransfer.errors import RankDeficiencyError, ShapeMismatchError, UnsupportedModelError
from fedtransfer.model import (
    DEFAULT_WEIGHT_DECAY,
    Batch,
    ModelSpec,
    ParamVector,
    build_network,
    forward,
    grad_input,
    grad_inputs,
    grad_params,
    init_params,
    load_params,
    loss,
    predict,
    quad_loss,
    quad_solve,
    save_params,
    sgd_epochs,
)

LINEAR = ModelSpec(kind="softmax_linear", input_dim=4, num_classes=3)
MLP = ModelSpec(kind="mlp", input_dim=4, num_classes=3, hidden_dims=(5, 4))


def _random_params(spec: ModelSpec, rng: np.random.Generator) -> ParamVector:
    return ParamVector(rng.normal(scale=0.7, size=spec.num_params), tuple(spec.layout()))


def _random_batch(spec: ModelSpec, rng: np.random.Generator, m: int = 6) -> Batch:
    return Batch(rng.uniform(size=(m, spec.input_dim)), rng.integers(0, spec.num_classes, size=m))


def _rel_err(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-3)


def test_zero_linear_model_gives_zero_logits():
    """W = 0, b = 0 yields all-zero logits and loss ln k."""
    params = ParamVector.zeros(LINEAR.layout())
    x = np.random.default_rng(0).uniform(size=(5, 4))
    assert np.array_equal(forward(LINEAR, params, x), np.zeros((5, 3)))
    batch = Batch(x, [0, 1, 2, 0, 1])
    assert abs(loss(LINEAR, params, batch) - np.log(3)) <= 1e-12


def test_symmetric_linear_logits():
    """Opposite weight rows cancel on x = [1, 1]."""
    spec = ModelSpec(kind="softmax_linear", input_dim=2, num_classes=2)
    params = ParamVector.from_tensors(
        {"W0": np.array([[1.0, 1.0], [-1.0, -1.0]]), "b0": np.zeros(2)}, spec.layout()
    )
    logits = forward(spec, params, [[1.0, 1.0]])
    assert logits[0, 0] - logits[0, 1] == 0.0


def test_mlp_forward_matches_matrix_arithmetic():
    """The MLP forward pass equals a hand-written recomputation."""
    spec = ModelSpec(kind="mlp", input_dim=3, num_classes=2, hidden_dims=(4,))
    rng = np.random.default_rng(1)
    params = _random_params(spec, rng)
    x = rng.uniform(size=(7, 3))
    t = params.tensors()
    expected = np.maximum(x @ t["W0"] + t["b0"], 0.0) @ t["W1"] + t["b1"]
    assert np.max(np.abs(forward(spec, params, x) - expected)) <= 1e-12


def test_loss_saturation_and_direct_formula():
    """A 40-logit margin drives the loss to zero; random cases match -log softmax."""
    params = ParamVector.from_tensors(
        {"W0": np.zeros((4, 3)), "b0": np.array([40.0, 0.0, 0.0])}, LINEAR.layout()
    )
    assert loss(LINEAR, params, Batch(np.zeros((1, 4)), [0])) < 1e-6

    rng = np.random.default_rng(2)
    params = _random_params(LINEAR, rng)
    batch = _random_batch(LINEAR, rng)
    logits = forward(LINEAR, params, batch.features)
    probs = np.exp(logits) / np.exp(logits).sum(axis=1, keepdims=True)
    direct = -np.mean(np.log(probs[np.arange(batch.size), batch.labels]))
    assert abs(loss(LINEAR, params, batch) - direct) <= 1e-12
    assert loss(LINEAR, params, batch) >= 0.0


@pytest.mark.parametrize("spec", [LINEAR, MLP], ids=["softmax_linear", "mlp"])
def test_param_gradient_finite_differences(spec):
    """100 random directional finite-difference probes agree with grad_params."""
    rng = np.random.default_rng(3)
    h = 1e-5
    worst = 0.0
    for _ in range(100):
        params = _random_params(spec, rng)
        batch = _random_batch(spec, rng)
        v = rng.standard_normal(spec.num_params)
        v /= np.linalg.norm(v)
        plus = loss(spec, params.with_values(params.values + h * v), batch)
        minus = loss(spec, params.with_values(params.values - h * v), batch)
        fd = (plus - minus) / (2 * h)
        analytic = float(grad_params(spec, params, batch).values @ v)
        worst = max(worst, _rel_err(fd, analytic))
    assert worst < 1e-5, f"worst relative error {worst}"


@pytest.mark.parametrize("spec", [LINEAR, MLP], ids=["softmax_linear", "mlp"])
def test_input_gradient_finite_differences(spec):
    """100 random probes of grad_input agree with central differences."""
    rng = np.random.default_rng(4)
    h = 1e-5
    worst = 0.0
    for _ in range(100):
        params = _random_params(spec, rng)
        x = rng.uniform(size=spec.input_dim)
        y = int(rng.integers(spec.num_classes))
        v = rng.standard_normal(spec.input_dim)
        v /= np.linalg.norm(v)
        plus = loss(spec, params, Batch(x + h * v, [y]))
        minus = loss(spec, params, Batch(x - h * v, [y]))
        fd = (plus - minus) / (2 * h)
        analytic = float(grad_input(spec, params, x, y) @ v)
        worst = max(worst, _rel_err(fd, analytic))
    assert worst < 1e-5, f"worst relative error {worst}"


def test_mean_gradient_is_mean_of_per_sample_gradients():
    """Gradient linearity over the batch."""
    rng = np.random.default_rng(5)
    params = _random_params(MLP, rng)
    batch = _random_batch(MLP, rng, m=8)
    full = grad_params(MLP, params, batch).values
    singles = [
        grad_params(MLP, params, Batch(batch.features[i : i + 1], batch.labels[i : i + 1])).values
        for i in range(batch.size)
    ]
    assert np.max(np.abs(full - np.mean(singles, axis=0))) <= 1e-12


def test_zero_gradient_at_analytic_optimum():
    """Identical inputs with a 30/70 label split are fit exactly by p1 = 0.3."""
    spec = ModelSpec(kind="softmax_linear", input_dim=2, num_classes=2)
    x = np.tile([0.2, 0.6], (10, 1))
    labels = np.array([1, 1, 1, 0, 0, 0, 0, 0, 0, 0])
    params = ParamVector.from_tensors(
        {"W0": np.zeros((2, 2)), "b0": np.array([0.0, np.log(0.3 / 0.7)])}, spec.layout()
    )
    g = grad_params(spec, params, Batch(x, labels))
    assert np.linalg.norm(g.values) < 1e-6


def test_binary_linear_input_gradient_closed_form():
    """The 2-class input gradient is collinear with w1 - w0 and has norm 0.5 |w1 - w0| at p = 0.5."""
    spec = ModelSpec(kind="softmax_linear", input_dim=5, num_classes=2)
    rng = np.random.default_rng(6)
    W = rng.standard_normal((5, 2))
    delta = W[:, 1] - W[:, 0]
    x = rng.uniform(size=5)
    params = ParamVector.from_tensors({"W0": W, "b0": rng.standard_normal(2)}, spec.layout())
    g = grad_input(spec, params, x, 0)
    cos = g @ delta / (np.linalg.norm(g) * np.linalg.norm(delta))
    assert abs(abs(cos) - 1.0) <= 1e-10

    balanced = ParamVector.from_tensors(
        {"W0": W, "b0": np.array([x @ W[:, 1], x @ W[:, 0]])}, spec.layout()
    )
    for y in (0, 1):
        g = grad_input(spec, balanced, x, y)
        assert abs(np.linalg.norm(g) - 0.5 * np.linalg.norm(delta)) <= 1e-12


def test_batched_input_gradients_match_single_sample():
    """grad_inputs row i equals grad_input on sample i."""
    rng = np.random.default_rng(7)
    params = _random_params(MLP, rng)
    batch = _random_batch(MLP, rng)
    rows = grad_inputs(MLP, params, batch.features, batch.labels)
    for i in range(batch.size):
        single = grad_input(MLP, params, batch.features[i], batch.labels[i])
        assert np.allclose(rows[i], single, rtol=0, atol=1e-14)


def test_shape_mismatch_is_reported():
    """Wrong feature width raises a shape-mismatch error."""
    params = init_params(LINEAR, seed=0)
    with pytest.raises(ShapeMismatchError):
        forward(LINEAR, params, np.zeros((2, 5)))


def test_quadratic_kind_has_no_classifier_network():
    """Only classifier kinds are in the network registry."""
    with pytest.raises(UnsupportedModelError):
        build_network(ModelSpec(kind="quadratic", input_dim=3, num_classes=0))


def test_init_is_glorot_uniform_with_zero_biases():
    """Weights lie within the Glorot limit and biases start at zero."""
    params = init_params(MLP, seed=11).tensors()
    limit = np.sqrt(6.0 / (4 + 5))
    assert np.all(np.abs(params["W0"]) <= limit)
    assert np.all(params["b0"] == 0.0)
    again = init_params(MLP, seed=11)
    assert np.array_equal(again.tensors()["W1"], params["W1"])


def test_sgd_zero_lr_and_single_full_batch_step():
    """lr = 0 is a no-op; one full-batch epoch is one step theta - lr (g + lambda theta)."""
    rng = np.random.default_rng(8)
    features = rng.uniform(size=(12, 4))
    labels = rng.integers(0, 3, size=12)
    params = init_params(LINEAR, seed=1)
    idx = np.arange(12)

    same = sgd_epochs(LINEAR, params, features, labels, idx, 3, 0.0, 4, seed=0, weight_decay=1e-3)
    assert np.array_equal(same.values, params.values)

    stepped = sgd_epochs(LINEAR, params, features, labels, idx, 1, 0.3, 12, seed=0, weight_decay=1e-3)
    g = grad_params(LINEAR, params, Batch(features, labels)).values
    expected = params.values - 0.3 * (g + 1e-3 * params.values)
    assert np.allclose(stepped.values, expected, rtol=0, atol=1e-12)


def test_sgd_is_deterministic_and_reduces_loss():
    """Fixed seed gives identical parameters; 50 epochs lower the loss."""
    ds = make_synthetic(3, 40, 4, 4.0, 2)
    spec = ModelSpec(kind="mlp", input_dim=4, num_classes=3, hidden_dims=(8,))
    params = init_params(spec, seed=3)
    idx = np.arange(ds.n)
    a = sgd_epochs(spec, params, ds.features, ds.labels, idx, 50, 0.1, 16, seed=5)
    b = sgd_epochs(spec, params, ds.features, ds.labels, idx, 50, 0.1, 16, seed=5)
    assert np.array_equal(a.values, b.values)
    batch = Batch(ds.features, ds.labels)
    assert loss(spec, a, batch) < loss(spec, params, batch)


def test_logistic_model_separates_wide_blobs():
    """Two well-separated blobs are learned to > 95% accuracy in 50 epochs."""
    ds = make_synthetic(2, 500, 2, 6.0, 1)
    spec = ModelSpec(kind="softmax_linear", input_dim=2, num_classes=2)
    params = sgd_epochs(
        spec, init_params(spec, 0), ds.features, ds.labels, np.arange(ds.n), 50, 0.5, 20, seed=0
    )
    accuracy = np.mean(predict(spec, params, ds.features) == ds.labels)
    assert accuracy > 0.95, f"accuracy {accuracy}"


def test_param_blob_roundtrip(tmp_path):
    """Parameters survive the binary blob and JSON sidecar."""
    params = init_params(MLP, seed=4)
    blob, sidecar = save_params(params, tmp_path / "params" / "target")
    assert blob.name == "target.bin" and sidecar.name == "target.json"
    assert blob.stat().st_size == 8 * len(params)
    loaded = load_params(tmp_path / "params" / "target")
    assert np.array_equal(loaded.values, params.values)
    assert loaded.layout == params.layout


def test_quadratic_loss_and_solve():
    """Hand-computed quadratic losses and an exact least-squares round trip."""
    assert quad_loss(np.zeros(2), np.eye(2)) == 0.0
    assert quad_loss(np.array([3.0, 4.0]), np.eye(2)) == 25.0
    rng = np.random.default_rng(9)
    for _ in range(20):
        X = rng.standard_normal((6, 3))
        theta = rng.standard_normal(3)
        assert np.max(np.abs(quad_solve(X, X @ theta) - theta)) <= 1e-10


def test_quadratic_solve_rejects_rank_deficiency():
    """Duplicated columns are rank deficient."""
    X = np.array([[1.0, 1.0], [2.0, 2.0], [3.0, 3.0]])
    with pytest.raises(RankDeficiencyError):
        quad_solve(X, np.ones(3))


def test_default_weight_decay_applies_to_plain_and_adversarial_training():
    """Leaving weight_decay unset trains with the package default of 1e-3."""
    assert DEFAULT_WEIGHT_DECAY == 1e-3
    rng = np.random.default_rng(4)
    features = rng.uniform(size=(12, 4))
    labels = rng.integers(0, 3, size=12)
    params = init_params(LINEAR, seed=2)
    idx = np.arange(12)

    implicit = sgd_epochs(LINEAR, params, features, labels, idx, 2, 0.3, 5, seed=1)
    explicit = sgd_epochs(LINEAR, params, features, labels, idx, 2, 0.3, 5, seed=1, weight_decay=1e-3)
    undecayed = sgd_epochs(LINEAR, params, features, labels, idx, 2, 0.3, 5, seed=1, weight_decay=0.0)
    assert np.array_equal(implicit.values, explicit.values)
    assert not np.array_equal(implicit.values, undecayed.values)

    cfg = AttackConfig(epsilon=0.0)
    adv = adv_train_epochs(LINEAR, params, features, labels, idx, cfg, 2, 0.3, 5, seed=1)
    assert np.array_equal(adv.values, explicit.values)
