"""Attack configuration and adversarial example records."""

import enum
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError

DEFAULT_EPSILON = 8.0 / 255.0
DEFAULT_STEPS = 10
# Default step size as a multiple of epsilon / steps.
STEP_SIZE_FACTOR = 2.5


class Norm(str, enum.Enum):
    """Perturbation norms."""

    LINF = "linf"
    L2 = "l2"


@dataclass
class AttackConfig:
    """PGD settings; ``step_size = None`` means ``2.5 * epsilon / steps``.

    ``epsilon = 0`` is accepted and turns every attack into the identity.
    ``seed`` drives the random start only.
    """

    epsilon: float = DEFAULT_EPSILON
    steps: int = DEFAULT_STEPS
    step_size: Optional[float] = None
    norm: Norm = Norm.LINF
    random_start: bool = False
    clip_min: float = 0.0
    clip_max: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        self.norm = Norm(self.norm)
        if self.epsilon < 0:
            raise InvalidArgumentError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.steps < 1:
            raise InvalidArgumentError(f"steps must be >= 1, got {self.steps}")
        if self.step_size is None:
            self.step_size = STEP_SIZE_FACTOR * self.epsilon / self.steps
        if self.step_size < 0 or (self.epsilon > 0 and not self.step_size > 0):
            raise InvalidArgumentError(f"step_size must be > 0, got {self.step_size}")
        if not self.clip_min < self.clip_max:
            raise InvalidArgumentError(
                f"clip_min ({self.clip_min}) must be below clip_max ({self.clip_max})"
            )

    def to_dict(self) -> Dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "steps": self.steps,
            "step_size": self.step_size,
            "norm": self.norm.value,
            "random_start": self.random_start,
            "clip_min": self.clip_min,
            "clip_max": self.clip_max,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "AttackConfig":
        return cls(**d)


@dataclass
class AdvExample:
    """One crafted sample ``(x, x', y)`` with the source loss before and after."""

    original: npt.NDArray[np.float64]
    perturbed: npt.NDArray[np.float64]
    label: int
    source_loss_before: float = float("nan")
    source_loss_after: float = float("nan")
    index: int = -1

    @property
    def perturbation(self) -> npt.NDArray[np.float64]:
        return self.perturbed - self.original

    def norm(self, norm: Norm = Norm.LINF) -> float:
        """Size of the perturbation in the given norm."""
        delta = self.perturbation
        if Norm(norm) is Norm.LINF:
            return float(np.max(np.abs(delta))) if delta.size else 0.0
        return float(np.linalg.norm(delta))


@dataclass
class AttackStats:
    """Summary of a crafted batch."""

    count: int
    mean_loss_before: float
    mean_loss_after: float
    loss_increased_fraction: float
    extra: Dict[str, Any] = field(default_factory=dict)
