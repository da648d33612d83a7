"""Tests for gradient alignment, estimated constants, the lower bound and bias-variance."""

import numpy as np
import pytest

from fedtransfer.data import Dataset, Partition
from fedtransfer.errors import (
    AssumptionViolationError,
    BoundUnderflowError,
    NonConvexModelError,
    UnsupportedModelError,
    ZeroGradientError,
)
from fedtransfer.model import ModelSpec, init_params
from fedtransfer.theory import (
    LinearRegressionFamily,
    TheoryConstants,
    binary_linear_params,
    binary_linear_spec,
    estimate_constants,
    gradient_alignment_R,
    lemma1_check,
    theorem1_bound,
    theorem1_empirical_check,
)


def _constants(**overrides) -> TheoryConstants:
    values = dict(
        L=1.0,
        mu=1.0,
        sigma_k=(1.0,),
        p_k=(1.0,),
        G=0.0,
        Gamma=0.0,
        E=1,
        K=1,
        T=9,
        theta1_dist_sq=0.0,
        theta_star_sq=1.0,
    )
    values.update(overrides)
    return TheoryConstants(**values)


def test_alignment_of_a_model_with_itself_is_one():
    spec = ModelSpec(kind="softmax_linear", input_dim=4, num_classes=3)
    params = init_params(spec, seed=2)
    x = np.array([0.2, 0.7, 0.1, 0.9])
    assert gradient_alignment_R(spec, params, spec, params, x, 1) == pytest.approx(1.0)


def test_alignment_of_orthogonal_binary_models_is_zero():
    spec = binary_linear_spec(3)
    a = binary_linear_params([1.0, 0.0, 0.0])
    b = binary_linear_params([0.0, 2.0, 0.0])
    x = np.array([0.3, 0.5, 0.2])
    assert abs(gradient_alignment_R(spec, a, spec, b, x, 0)) < 1e-10


def test_alignment_of_antipodal_binary_models_is_minus_one():
    spec = binary_linear_spec(3)
    w = np.array([0.5, -1.0, 2.0])
    x = np.array([0.1, 0.4, 0.8])
    r = gradient_alignment_R(spec, binary_linear_params(w), spec, binary_linear_params(-w), x, 1)
    assert r == pytest.approx(-1.0)


def test_alignment_with_zero_gradient_raises():
    spec = ModelSpec(kind="quadratic", input_dim=2)
    theta = init_params(spec, seed=0)
    with pytest.raises(ZeroGradientError):
        gradient_alignment_R(spec, theta, spec, theta, np.zeros(2), 0)


@pytest.mark.parametrize("family", ["quadratic", "binary_linear"])
def test_alignment_equals_parameter_cosine(family):
    """R equals cos(theta, theta') on every usable probe."""
    rng = np.random.default_rng(11)
    for _ in range(10):
        d = int(rng.integers(2, 6))
        theta, theta_prime = rng.normal(size=d), rng.normal(size=d)
        probes = rng.normal(size=(100, d))
        labels = rng.integers(0, 2, size=100)
        result = lemma1_check(theta, theta_prime, probes, family=family, labels=labels)
        assert result.max_deviation < 1e-9, result
        assert result.probes_used + result.probes_skipped == 100
        assert result.probes_used > 0


def test_alignment_identity_edge_cases():
    theta = np.array([1.0, 2.0, -0.5])
    probes = np.array([[1.0, 1.0, 1.0], [0.5, 0.2, 0.1]])
    same = lemma1_check(theta, theta, probes)
    assert same.max_deviation < 1e-12 and same.probes_used == 2

    orth = lemma1_check(np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([[1.0, 1.0]]))
    assert orth.probes_used == 1 and orth.max_deviation < 1e-12


def test_alignment_identity_rejects_other_families():
    with pytest.raises(UnsupportedModelError):
        lemma1_check([1.0, 0.0], [0.0, 1.0], [[1.0, 1.0]], family="mlp")


def test_quadratic_identity_design_has_curvature_two():
    """sum (x theta)^2 with X = I has Hessian 2 I."""
    spec = ModelSpec(kind="quadratic", input_dim=3)
    dataset = Dataset(np.eye(3), np.zeros(3, dtype=np.int64), 1)
    partition = Partition.from_assignments([[0, 1, 2]], 3)
    c = estimate_constants(spec, dataset, partition, E=1, K=1, T=10, samples=5, seed=0, weight_decay=0.0)
    assert c.L == pytest.approx(2.0, abs=1e-6)
    assert c.mu == pytest.approx(2.0, abs=1e-6)


def test_replicated_clients_have_no_heterogeneity():
    rng = np.random.default_rng(3)
    block = rng.uniform(size=(12, 4))
    labels = np.tile(np.arange(3), 4)
    dataset = Dataset(np.vstack([block] * 3), np.concatenate([labels] * 3), 3)
    partition = Partition.from_assignments([np.arange(12) + 12 * k for k in range(3)], 36)
    spec = ModelSpec(kind="softmax_linear", input_dim=4, num_classes=3)
    c = estimate_constants(spec, dataset, partition, E=2, K=2, T=20, samples=4, seed=1, batch_size=6)
    assert c.Gamma < 1e-4
    assert c.L >= c.mu > 0
    assert len(c.sigma_k) == 3


def test_estimation_rejects_non_convex_models():
    spec = ModelSpec(kind="mlp", input_dim=2, num_classes=2, hidden_dims=(3,))
    dataset = Dataset(np.array([[0.1, 0.2], [0.8, 0.9]]), np.array([0, 1]), 2)
    partition = Partition.from_assignments([[0, 1]], 2)
    with pytest.raises(NonConvexModelError):
        estimate_constants(spec, dataset, partition, E=1, K=1, T=1, samples=1, seed=0)


def test_single_local_epoch_drops_drift_term():
    c = _constants(sigma_k=(0.5, 2.0), p_k=(0.25, 0.75), G=3.0, Gamma=0.2, L=2.0, E=1, K=4)
    expected = 0.25**2 * 0.5**2 + 0.75**2 * 2.0**2 + 6 * 2.0 * 0.2
    assert c.B == pytest.approx(expected)
    assert c.C == pytest.approx(4.0 / 4 * 9.0)


def test_bound_by_hand():
    report = theorem1_bound(_constants())
    assert report.value == pytest.approx(8.0)


def test_bound_grows_with_rounds_and_shrinks_with_heterogeneity():
    base = _constants(G=0.5, Gamma=0.1, theta1_dist_sq=0.3)
    assert theorem1_bound(_constants(G=0.5, Gamma=0.1, theta1_dist_sq=0.3, T=18)).value > theorem1_bound(base).value
    assert theorem1_bound(base.with_gamma(1.0)).value < theorem1_bound(base).value


def test_centralized_bound_exceeds_federated_with_local_steps():
    c = _constants(G=1.0, E=3, K=2)
    report = theorem1_bound(c)
    assert report.corollary > report.value


def test_bound_denominator_underflow():
    c = _constants(sigma_k=(0.0,), G=0.0, Gamma=0.0, theta1_dist_sq=0.0)
    with pytest.raises(BoundUnderflowError):
        theorem1_bound(c)


def test_constants_roundtrip_through_dict():
    c = _constants(sigma_k=(0.5, 2.0), p_k=(0.25, 0.75))
    assert TheoryConstants.from_dict(c.to_dict()) == c


def _well_conditioned_design(rng: np.random.Generator, m: int, d: int) -> np.ndarray:
    q, _ = np.linalg.qr(rng.normal(size=(m, d)))
    return 1.5 * q


def test_empirical_check_accounts_for_every_instance():
    rng = np.random.default_rng(5)
    total = 0
    for _ in range(40):
        d = int(rng.integers(1, 6))
        X = _well_conditioned_design(rng, d + 3, d)
        theta_star = rng.normal(size=d)
        l_star = float(np.sum((X @ theta_star) ** 2))
        losses = l_star + rng.uniform(0.1, 5.0, size=5)
        report = theorem1_empirical_check(X, theta_star, losses)
        assert report.checked == 5 and report.skipped == 0
        assert report.final_holds + len(report.violations) == report.checked
        assert 0 <= report.loss_gap_step_holds <= report.checked
        total += report.checked
    assert total == 200


def test_empirical_check_skips_degenerate_gap():
    X = 2.0 * np.eye(2)
    theta_star = np.array([1.0, -1.0])
    l_star = float(np.sum((X @ theta_star) ** 2))
    report = theorem1_empirical_check(X, theta_star, [l_star, l_star + 1.0])
    assert report.skipped == 1 and report.checked == 1


def test_empirical_check_requires_dominant_gram_matrix():
    with pytest.raises(AssumptionViolationError):
        theorem1_empirical_check(0.1 * np.eye(3), np.ones(3), [10.0])


def test_bias_variance_single_model_decomposition():
    report = LinearRegressionFamily().run([1], trials=300, seed=0)
    gap = abs(report.mse_ensemble[1] - (report.bias_sq + report.variance_single))
    assert gap <= 3 * report.mse_stderr[1] + 1e-12


def test_decomposition_residual_error_shrinks_with_trials():
    """Halving the trials widens the residual's standard error by about sqrt(2)."""
    family = LinearRegressionFamily()
    full = family.run([1, 4], trials=800, seed=2)
    half = family.run([1, 4], trials=400, seed=2)
    for n in (1, 4):
        ratio = half.residual_stderr(n) / full.residual_stderr(n)
        assert 1.2 <= ratio <= 1.7, f"n={n}: stderr ratio {ratio:.3f}"


@pytest.mark.slow
def test_ensemble_variance_follows_one_over_n():
    """Averaging n independent models divides the variance by n and lowers the error."""
    report = LinearRegressionFamily().run([1, 2, 4, 8], trials=2000, seed=1)
    expected = report.variance_single / 4
    assert abs(report.variance_ensemble[4] - expected) <= 0.15 * expected
    sizes = [1, 2, 4, 8]
    for a, b in zip(sizes, sizes[1:]):
        assert report.mse_ensemble[b] <= report.mse_ensemble[a] + report.mse_stderr[a], report.to_dict()
