"""FGSM and PGD on the input features.

Both attacks run through :func:`pgd_rows`, which perturbs every row of a
matrix independently, so a one-step PGD with ``step_size = epsilon`` is the
FGSM step bit for bit.
"""

from typing import Optional, Sequence

import numpy as np
import numpy.typing as npt

from ..model.functional import grad_inputs, per_sample_loss
from ..model.params import ParamVector
from ..model.spec import Batch, ModelSpec
from ..rng import derive_rng
from .config import AdvExample, AttackConfig, Norm


def _random_start(
    original: npt.NDArray[np.float64], config: AttackConfig, rngs: Sequence[np.random.Generator]
) -> npt.NDArray[np.float64]:
    starts = np.empty_like(original)
    dim = original.shape[1]
    for i, rng in enumerate(rngs):
        if config.norm is Norm.LINF:
            starts[i] = rng.uniform(-config.epsilon, config.epsilon, size=dim)
        else:
            direction = rng.standard_normal(dim)
            direction /= max(np.linalg.norm(direction), 1e-300)
            starts[i] = direction * config.epsilon * rng.uniform() ** (1.0 / dim)
    return starts


def project(
    perturbed: npt.NDArray[np.float64], original: npt.NDArray[np.float64], config: AttackConfig
) -> npt.NDArray[np.float64]:
    """Project rows onto the epsilon-ball around ``original``, then clip to the domain."""
    delta = perturbed - original
    if config.norm is Norm.LINF:
        delta = np.clip(delta, -config.epsilon, config.epsilon)
    else:
        norms = np.linalg.norm(delta, axis=1, keepdims=True)
        scale = np.minimum(1.0, config.epsilon / np.where(norms > 0, norms, 1.0))
        delta = delta * scale
    return np.clip(original + delta, config.clip_min, config.clip_max)


def ascent_direction(grad: npt.NDArray[np.float64], norm: Norm) -> npt.NDArray[np.float64]:
    """Signed gradient (L-inf, ``sign(0) = 0``) or row-normalized gradient (L2)."""
    if norm is Norm.LINF:
        return np.sign(grad)
    norms = np.linalg.norm(grad, axis=1, keepdims=True)
    return np.where(norms > 0, grad / np.where(norms > 0, norms, 1.0), 0.0)


def pgd_rows(
    spec: ModelSpec,
    params: ParamVector,
    features: npt.NDArray[np.float64],
    labels: npt.NDArray[np.int64],
    config: AttackConfig,
    rngs: Optional[Sequence[np.random.Generator]] = None,
) -> npt.NDArray[np.float64]:
    """Run PGD on every row of ``features``.

    Args:
        spec: Source model architecture.
        params: Source model parameters.
        features: m x p clean inputs inside the domain.
        labels: m true labels.
        config: Attack settings.
        rngs: One generator per row for the random start (required only when
            ``config.random_start`` is set).

    Returns:
        m x p perturbed inputs.
    """
    original = np.atleast_2d(np.asarray(features, dtype=np.float64))
    labels = np.atleast_1d(np.asarray(labels, dtype=np.int64))
    if config.epsilon == 0.0:
        return original.copy()
    x = original.copy()
    if config.random_start:
        if rngs is None:
            rngs = [derive_rng(config.seed, "pgd", i) for i in range(original.shape[0])]
        x = project(original + _random_start(original, config, rngs), original, config)
    for _ in range(config.steps):
        grad = grad_inputs(spec, params, x, labels)
        x = project(x + config.step_size * ascent_direction(grad, config.norm), original, config)
    return x


def _example(spec, params, x, perturbed, y, index=-1) -> AdvExample:
    before = per_sample_loss(spec, params, Batch(x[None, :], [y]))[0]
    after = per_sample_loss(spec, params, Batch(perturbed[None, :], [y]))[0]
    return AdvExample(x.copy(), perturbed, int(y), float(before), float(after), index)


def pgd(
    spec: ModelSpec, params: ParamVector, x: npt.ArrayLike, y: int, config: AttackConfig
) -> AdvExample:
    """Projected gradient ascent on the loss of a single sample.

    Each step moves by ``step_size * sign(grad)`` (L-inf) or
    ``step_size * grad / |grad|`` (L2), projects onto the epsilon-ball and
    clips to ``[clip_min, clip_max]``.
    """
    x = np.asarray(x, dtype=np.float64)
    rngs = [derive_rng(config.seed, "pgd", 0)] if config.random_start else None
    perturbed = pgd_rows(spec, params, x[None, :], np.array([y]), config, rngs)[0]
    return _example(spec, params, x, perturbed, y)


def fgsm(
    spec: ModelSpec, params: ParamVector, x: npt.ArrayLike, y: int, epsilon: float
) -> AdvExample:
    """Single signed-gradient step ``clip(x + epsilon * sign(grad))``."""
    config = AttackConfig(epsilon=epsilon, steps=1, step_size=epsilon, norm=Norm.LINF)
    return pgd(spec, params, x, y, config)
