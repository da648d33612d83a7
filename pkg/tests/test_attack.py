"""Tests for FGSM, PGD, batch crafting and adversarial training."""

import numpy as np
import pytest

from fedtransfer.attack import (
    AttackConfig,
    adv_train_epochs,
    craft_batch,
    fgsm,
    load_adv_batch,
    pgd,
    save_adv_batch,
)
from fedtransfer.data import make_synthetic
from fedtransfer.errors import InvalidArgumentError
from fedtransfer.model import (
    ModelSpec,
    ParamVector,
    grad_input,
    init_params,
    predict,
    sgd_epochs,
)

LINEAR2 = ModelSpec(kind="softmax_linear", input_dim=6, num_classes=2)
SPECS = [
    ModelSpec(kind="softmax_linear", input_dim=5, num_classes=3),
    ModelSpec(kind="mlp", input_dim=5, num_classes=3, hidden_dims=(6,)),
]


def _random_params(spec: ModelSpec, rng: np.random.Generator) -> ParamVector:
    return ParamVector(rng.normal(size=spec.num_params), tuple(spec.layout()))


def _trained_toy(seed: int = 0):
    ds = make_synthetic(3, 80, 5, 3.0, seed)
    spec = ModelSpec(kind="softmax_linear", input_dim=5, num_classes=3)
    params = sgd_epochs(spec, init_params(spec, 0), ds.features, ds.labels, np.arange(ds.n), 30, 0.5, 16, seed=0)
    return ds, spec, params


def test_attack_config_defaults():
    """Defaults are 10 L-inf steps at 8/255 with step 2.5 eps / steps and no random start."""
    cfg = AttackConfig()
    assert cfg.epsilon == 8 / 255
    assert cfg.steps == 10
    assert cfg.step_size == pytest.approx(2.5 * (8 / 255) / 10)
    assert cfg.norm.value == "linf" and not cfg.random_start
    with pytest.raises(InvalidArgumentError):
        AttackConfig(steps=0)
    with pytest.raises(InvalidArgumentError):
        AttackConfig(epsilon=0.1, step_size=0.0)
    assert AttackConfig(epsilon=0.0).step_size == 0.0


def test_fgsm_step_is_signed_gradient():
    """Away from the box, perturbed - x = eps * sign(grad) exactly up to rounding."""
    rng = np.random.default_rng(0)
    params = _random_params(LINEAR2, rng)
    x = rng.uniform(0.2, 0.8, size=6)
    adv = fgsm(LINEAR2, params, x, 1, 0.05)
    g = grad_input(LINEAR2, params, x, 1)
    assert np.allclose(adv.perturbed - x, 0.05 * np.sign(g), rtol=0, atol=1e-15)


def test_fgsm_follows_closed_form_direction():
    """For y = 0 on a 2-class linear model the step follows sign(w1 - w0)."""
    rng = np.random.default_rng(1)
    W = rng.standard_normal((6, 2))
    params = ParamVector.from_tensors({"W0": W, "b0": np.zeros(2)}, LINEAR2.layout())
    x = rng.uniform(0.2, 0.8, size=6)
    adv = fgsm(LINEAR2, params, x, 0, 0.01)
    assert np.array_equal(np.sign(adv.perturbation), np.sign(W[:, 1] - W[:, 0]))


def test_zero_epsilon_is_identity():
    """eps = 0 leaves inputs untouched for both attacks."""
    rng = np.random.default_rng(2)
    params = _random_params(LINEAR2, rng)
    x = rng.uniform(size=6)
    assert np.array_equal(fgsm(LINEAR2, params, x, 0, 0.0).perturbed, x)
    cfg = AttackConfig(epsilon=0.0, random_start=True)
    assert np.array_equal(pgd(LINEAR2, params, x, 1, cfg).perturbed, x)


def test_fuzzed_pgd_invariants():
    """1000 random configurations: ball, box and FGSM reduction hold with zero violations."""
    rng = np.random.default_rng(3)
    violations = []
    for trial in range(1000):
        spec = SPECS[trial % 2]
        params = _random_params(spec, rng)
        x = rng.uniform(size=spec.input_dim)
        y = int(rng.integers(spec.num_classes))
        eps = float(rng.uniform(0.0, 0.4))
        steps = int(rng.integers(1, 8))
        norm = "linf" if rng.uniform() < 0.5 else "l2"
        cfg = AttackConfig(
            epsilon=eps,
            steps=steps,
            step_size=float(rng.uniform(0.01, 0.3)) if eps > 0 else 0.0,
            norm=norm,
            random_start=bool(rng.uniform() < 0.5),
            seed=trial,
        )
        adv = pgd(spec, params, x, y, cfg)
        if adv.norm(cfg.norm) > eps + 1e-9:
            violations.append(("ball", trial))
        if adv.perturbed.min() < 0.0 or adv.perturbed.max() > 1.0:
            violations.append(("box", trial))
        reduced = AttackConfig(epsilon=eps, steps=1, step_size=eps, norm="linf")
        if not np.array_equal(fgsm(spec, params, x, y, eps).perturbed, pgd(spec, params, x, y, reduced).perturbed):
            violations.append(("fgsm", trial))
    assert violations == []


def test_interior_pgd_never_projects():
    """With steps * step_size < eps the result equals the unprojected signed-gradient sum."""
    rng = np.random.default_rng(4)
    spec = SPECS[1]
    for _ in range(20):
        params = _random_params(spec, rng)
        x = rng.uniform(0.3, 0.7, size=spec.input_dim)
        y = int(rng.integers(spec.num_classes))
        cfg = AttackConfig(epsilon=0.05, steps=4, step_size=0.01)
        walk = x.copy()
        for _ in range(cfg.steps):
            walk = walk + cfg.step_size * np.sign(grad_input(spec, params, walk, y))
        assert np.allclose(pgd(spec, params, x, y, cfg).perturbed, walk, rtol=0, atol=1e-12)


def test_pgd_increases_source_loss():
    """Loss after the attack is not below the clean loss on at least 95% of 200 samples."""
    ds, spec, params = _trained_toy()
    batch = craft_batch(spec, params, ds, np.arange(200), AttackConfig(epsilon=0.05))
    assert batch.stats().loss_increased_fraction >= 0.95


def test_craft_batch_order_and_determinism():
    """One example per index, in order; same seed reproduces the perturbations."""
    ds, spec, params = _trained_toy()
    cfg = AttackConfig(epsilon=0.1, random_start=True, seed=7)
    idx = [17, 3, 120, 45]
    a = craft_batch(spec, params, ds, idx, cfg)
    b = craft_batch(spec, params, ds, idx, cfg)
    assert len(a) == 4
    assert [ex.index for ex in a] == idx
    assert np.array_equal(a.perturbed, b.perturbed)
    for ex in a:
        assert ex.norm() <= cfg.epsilon + 1e-9
        assert np.array_equal(ex.original, ds.features[ex.index])

    alone = craft_batch(spec, params, ds, [120], cfg)
    assert np.allclose(alone.perturbed[0], a.perturbed[2], rtol=0, atol=1e-12)

    with pytest.raises(InvalidArgumentError):
        craft_batch(spec, params, ds, [], cfg)


def test_adv_batch_roundtrip(tmp_path):
    """Blob + manifest round-trip preserves every array."""
    ds, spec, params = _trained_toy()
    batch = craft_batch(spec, params, ds, np.arange(10), AttackConfig(epsilon=0.1))
    save_adv_batch(batch, tmp_path / "adv")
    loaded = load_adv_batch(tmp_path / "adv")
    assert np.array_equal(loaded.perturbed, batch.perturbed)
    assert np.array_equal(loaded.original, batch.original)
    assert np.array_equal(loaded.indices, batch.indices)
    assert loaded.config.to_dict() == batch.config.to_dict()


def test_adv_training_with_zero_epsilon_matches_sgd():
    """eps = 0 adversarial training follows the plain SGD trajectory exactly."""
    ds = make_synthetic(3, 30, 5, 3.0, 1)
    spec = SPECS[1]
    start = init_params(spec, 2)
    idx = np.arange(ds.n)
    plain = sgd_epochs(spec, start, ds.features, ds.labels, idx, 3, 0.1, 10, seed=4, weight_decay=1e-3)
    adv = adv_train_epochs(
        spec, start, ds.features, ds.labels, idx, AttackConfig(epsilon=0.0), 3, 0.1, 10, seed=4, weight_decay=1e-3
    )
    assert np.array_equal(plain.values, adv.values)


def test_adv_training_is_deterministic():
    """Random-start adversarial training is reproducible for a fixed seed."""
    ds = make_synthetic(3, 30, 5, 3.0, 1)
    spec = SPECS[0]
    cfg = AttackConfig(epsilon=0.05, steps=3, random_start=True)
    runs = [
        adv_train_epochs(spec, init_params(spec, 0), ds.features, ds.labels, np.arange(ds.n), cfg, 2, 0.1, 16, seed=9)
        for _ in range(2)
    ]
    assert np.array_equal(runs[0].values, runs[1].values)


@pytest.mark.slow
def test_adv_training_improves_adversarial_accuracy():
    """On held-out rows an adversarially trained model resists white-box PGD better.

    Three informative coordinates and 37 pure-noise ones: a plain model fitted
    on 150 rows picks up weight on the noise coordinates, which an L-inf attack
    exploits in every dimension at once.
    """
    ds = make_synthetic(3, 150, 40, 3.0, 5)
    rows = np.arange(ds.n)
    train, held_out = rows[rows % 3 == 0], rows[rows % 3 != 0]
    spec = ModelSpec(kind="mlp", input_dim=40, num_classes=3, hidden_dims=(16,))
    cfg = AttackConfig(epsilon=0.05, steps=5)
    start = init_params(spec, 1)
    plain = sgd_epochs(spec, start, ds.features, ds.labels, train, 60, 0.1, 16, seed=0)
    robust = adv_train_epochs(spec, start, ds.features, ds.labels, train, cfg, 60, 0.1, 16, seed=0)

    def adv_acc(params):
        batch = craft_batch(spec, params, ds, held_out, cfg)
        return float(np.mean(predict(spec, params, batch.perturbed) == ds.labels[held_out]))

    plain_acc, robust_acc = adv_acc(plain), adv_acc(robust)
    assert robust_acc > plain_acc + 0.02, f"robust {robust_acc:.3f} vs plain {plain_acc:.3f}"
