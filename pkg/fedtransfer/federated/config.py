"""Federated training configuration."""

from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

from ..aggregation.rule import AggregationRule
from ..attack.config import AttackConfig
from ..errors import InvalidArgumentError
from ..model.training import DEFAULT_WEIGHT_DECAY

# Fraction of clients sampled per round when clients_per_round is not set.
DEFAULT_PARTICIPATION = 0.1


def default_clients_per_round(num_clients: int) -> int:
    """10% participation, at least one client."""
    return max(1, int(round(DEFAULT_PARTICIPATION * num_clients)))


@dataclass
class FedConfig:
    """Settings of the federated training loop.

    ``clients_per_round = None`` resolves to 10% of the clients at training time.
    ``adversarial_training`` switches clients from SGD to PGD adversarial training.
    Snapshots of the global model are kept for every round in ``checkpoint_rounds``.
    """

    rounds: int = 50
    clients_per_round: Optional[int] = None
    local_epochs: int = 1
    lr: float = 0.1
    batch_size: int = 50
    weight_decay: float = DEFAULT_WEIGHT_DECAY
    momentum: float = 0.0
    rule: AggregationRule = field(default_factory=AggregationRule)
    early_stop_acc: Optional[float] = None
    eval_every: int = 5
    adversarial_training: Optional[AttackConfig] = None
    checkpoint_rounds: Tuple[int, ...] = ()
    client_workers: int = 1

    def __post_init__(self) -> None:
        if isinstance(self.rule, dict):
            self.rule = AggregationRule.from_dict(self.rule)
        if isinstance(self.adversarial_training, dict):
            self.adversarial_training = AttackConfig.from_dict(self.adversarial_training)
        self.checkpoint_rounds = tuple(int(r) for r in self.checkpoint_rounds)
        if self.rounds < 1:
            raise InvalidArgumentError(f"rounds must be >= 1, got {self.rounds}")
        if self.local_epochs < 1:
            raise InvalidArgumentError(f"local_epochs must be >= 1, got {self.local_epochs}")
        if self.clients_per_round is not None and self.clients_per_round < 1:
            raise InvalidArgumentError(
                f"clients_per_round must be >= 1, got {self.clients_per_round}"
            )
        if self.lr < 0:
            raise InvalidArgumentError(f"lr must be >= 0, got {self.lr}")
        if self.batch_size < 1:
            raise InvalidArgumentError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.eval_every < 1:
            raise InvalidArgumentError(f"eval_every must be >= 1, got {self.eval_every}")
        if self.early_stop_acc is not None and not 0.0 <= self.early_stop_acc <= 1.0:
            raise InvalidArgumentError(
                f"early_stop_acc must be in [0, 1], got {self.early_stop_acc}"
            )
        if self.client_workers < 1:
            raise InvalidArgumentError(f"client_workers must be >= 1, got {self.client_workers}")

    def resolve_clients_per_round(self, num_clients: int) -> int:
        """Effective K for a partition of ``num_clients`` clients.

        Raises:
            InvalidArgumentError: If K exceeds N or the rule needs more updates than K.
        """
        k = self.clients_per_round or default_clients_per_round(num_clients)
        if k > num_clients:
            raise InvalidArgumentError(
                f"clients_per_round ({k}) exceeds the number of clients ({num_clients})"
            )
        if 1 < k < self.rule.min_updates():
            raise InvalidArgumentError(
                f"rule '{self.rule.kind.value}' needs at least {self.rule.min_updates()} "
                f"updates per round, got K={k}"
            )
        return k

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rounds": self.rounds,
            "clients_per_round": self.clients_per_round,
            "local_epochs": self.local_epochs,
            "lr": self.lr,
            "batch_size": self.batch_size,
            "weight_decay": self.weight_decay,
            "momentum": self.momentum,
            "rule": self.rule.to_dict(),
            "early_stop_acc": self.early_stop_acc,
            "eval_every": self.eval_every,
            "adversarial_training": (
                None if self.adversarial_training is None else self.adversarial_training.to_dict()
            ),
            "checkpoint_rounds": list(self.checkpoint_rounds),
            "client_workers": self.client_workers,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "FedConfig":
        return cls(**d)
