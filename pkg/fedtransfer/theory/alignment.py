"""Input-gradient alignment between two models and the cosine-of-parameters identity."""

from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError, ShapeMismatchError, UnsupportedModelError, ZeroGradientError
from ..model.functional import grad_input
from ..model.params import ParamVector
from ..model.spec import ModelKind, ModelSpec


class AlignmentFamily(str, Enum):
    """Model families whose input gradient is ``theta^T rho(x, theta)`` with scalar rho."""

    QUADRATIC = "quadratic"
    BINARY_LINEAR = "binary_linear"


@dataclass(frozen=True)
class Lemma1Result:
    """Largest ``|R - cos(theta, theta')|`` over the probes that were used.

    Probes where the two scalar factors rho do not share a strictly positive
    sign (the identity then holds only up to that sign) are skipped.
    """

    max_deviation: float
    probes_used: int
    probes_skipped: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "max_deviation": self.max_deviation,
            "probes_used": self.probes_used,
            "probes_skipped": self.probes_skipped,
        }


def cosine(a: npt.ArrayLike, b: npt.ArrayLike) -> float:
    """Cosine similarity, clipped to [-1, 1].

    Raises:
        ZeroGradientError: If either vector is zero.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroGradientError("cosine similarity is undefined for a zero vector")
    return float(np.clip((a @ b) / (na * nb), -1.0, 1.0))


def gradient_alignment_R(
    source_spec: ModelSpec,
    source_params: ParamVector,
    target_spec: ModelSpec,
    target_params: ParamVector,
    x: npt.ArrayLike,
    y: int,
) -> float:
    """Cosine between the source and target input-gradients of the loss at ``(x, y)``.

    Raises:
        ZeroGradientError: If either input gradient vanishes.
    """
    g_source = grad_input(source_spec, source_params, x, y)
    g_target = grad_input(target_spec, target_params, x, y)
    return cosine(g_source, g_target)


def binary_linear_spec(dim: int) -> ModelSpec:
    return ModelSpec(kind=ModelKind.SOFTMAX_LINEAR, input_dim=dim, num_classes=2)


def binary_linear_params(direction: npt.ArrayLike) -> ParamVector:
    """Two-class softmax-linear parameters with class-1 weights ``direction``, class-0 weights and biases zero."""
    w = np.asarray(direction, dtype=np.float64)
    spec = binary_linear_spec(w.size)
    W = np.zeros((w.size, 2))
    W[:, 1] = w
    return ParamVector.from_tensors({"W0": W, "b0": np.zeros(2)}, spec.layout())


def lemma1_check(
    theta: npt.ArrayLike,
    theta_prime: npt.ArrayLike,
    probe_set: npt.ArrayLike,
    family: str = "quadratic",
    labels: Optional[npt.ArrayLike] = None,
) -> Lemma1Result:
    """Compare the gradient alignment R with ``cos(theta, theta')`` on every probe.

    Args:
        theta: Target direction vector.
        theta_prime: Source direction vector.
        probe_set: m x d probe inputs.
        family: ``quadratic`` (f = (x theta)^2) or ``binary_linear``.
        labels: Probe labels for ``binary_linear`` (zeros when None).

    Raises:
        UnsupportedModelError: For any other family.
    """
    try:
        kind = AlignmentFamily(family)
    except ValueError:
        raise UnsupportedModelError(
            f"Unknown alignment family '{family}'. Available: "
            + ", ".join(f.value for f in AlignmentFamily)
        ) from None
    theta = np.asarray(theta, dtype=np.float64).ravel()
    theta_prime = np.asarray(theta_prime, dtype=np.float64).ravel()
    probes = np.atleast_2d(np.asarray(probe_set, dtype=np.float64))
    if theta.shape != theta_prime.shape or probes.shape[1] != theta.size:
        raise ShapeMismatchError(
            f"theta {theta.shape}, theta' {theta_prime.shape} and probes {probes.shape} disagree"
        )
    if probes.shape[0] == 0:
        raise InvalidArgumentError("lemma1_check needs at least one probe")
    expected = cosine(theta, theta_prime)

    if kind is AlignmentFamily.QUADRATIC:
        spec = ModelSpec(kind=ModelKind.QUADRATIC, input_dim=theta.size)
        target = ParamVector(theta, tuple(spec.layout()))
        source = ParamVector(theta_prime, tuple(spec.layout()))
        y = np.zeros(probes.shape[0], dtype=np.int64)
    else:
        spec = binary_linear_spec(theta.size)
        target = binary_linear_params(theta)
        source = binary_linear_params(theta_prime)
        y = np.zeros(probes.shape[0], dtype=np.int64) if labels is None else np.asarray(labels, dtype=np.int64)

    deviation, used, skipped = 0.0, 0, 0
    for x, label in zip(probes, y):
        if kind is AlignmentFamily.QUADRATIC and float(x @ theta) * float(x @ theta_prime) <= 0:
            skipped += 1
            continue
        try:
            r = gradient_alignment_R(spec, source, spec, target, x, int(label))
        except ZeroGradientError:
            skipped += 1
            continue
        deviation = max(deviation, abs(r - expected))
        used += 1
    return Lemma1Result(deviation, used, skipped)
