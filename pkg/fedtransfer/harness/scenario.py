"""Scenario and sweep descriptions, JSON config loading and ``key=value`` overrides."""

import copy
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..attack.config import AttackConfig
from ..data.controls import HeterogeneityControls
from ..data.dataset import Dataset, build_dataset, train_eval_split
from ..errors import InvalidArgumentError
from ..federated.config import FedConfig
from ..model.spec import ModelSpec
from ..model.training import DEFAULT_WEIGHT_DECAY
from ..rng import derive_rng


class SurrogateMode(str, enum.Enum):
    CENTRALIZED = "centralized"
    FEDERATED = "federated"


class SurrogatePartition(str, enum.Enum):
    """Federated surrogates reuse the coalition's own shards or re-partition the pooled data."""

    SAME = "same"
    DIFFERENT = "different"


class SweepAxis(str, enum.Enum):
    NUM_MALICIOUS = "num_malicious"
    DIRICHLET_ALPHA = "dirichlet_alpha"
    UNBALANCE_SGM = "unbalance_sgm"
    MAX_CLASSES = "max_classes"
    CLIENTS_PER_ROUND = "clients_per_round"
    NUM_CLIENTS_TOTAL = "num_clients_total"
    AGGREGATION_RULE = "aggregation_rule"


@dataclass
class DatasetSpec:
    """Where the data comes from and how much of it is held out for evaluation."""

    source: str = "synthetic"
    num_classes: int = 10
    samples_per_class: int = 100
    dim: int = 20
    class_separation: float = 3.0
    images_path: Optional[str] = None
    labels_path: Optional[str] = None
    eval_fraction: float = 0.2

    def __post_init__(self) -> None:
        if not 0.0 < self.eval_fraction < 1.0:
            raise InvalidArgumentError(f"eval_fraction must be in (0, 1), got {self.eval_fraction}")

    def build(self, seed: int) -> Tuple[Dataset, Dataset]:
        """``(train, eval)`` with disjoint rows."""
        dataset = build_dataset(
            self.source,
            seed=seed,
            num_classes=self.num_classes,
            samples_per_class=self.samples_per_class,
            dim=self.dim,
            class_separation=self.class_separation,
            images_path=self.images_path,
            labels_path=self.labels_path,
        )
        return train_eval_split(dataset, self.eval_fraction, seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "source": self.source,
            "num_classes": self.num_classes,
            "samples_per_class": self.samples_per_class,
            "dim": self.dim,
            "class_separation": self.class_separation,
            "images_path": self.images_path,
            "labels_path": self.labels_path,
            "eval_fraction": self.eval_fraction,
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "DatasetSpec":
        return cls(**d)


@dataclass
class SurrogateConfig:
    """How the attacker trains its surrogate on the coalition's data.

    Centralized surrogates use the momentum-SGD settings below. Federated
    surrogates use ``fed`` (the target's federated settings when None).
    ``model`` selects a different architecture than the target's.
    """

    mode: SurrogateMode = SurrogateMode.CENTRALIZED
    partition: SurrogatePartition = SurrogatePartition.SAME
    model: Optional[ModelSpec] = None
    epochs: int = 20
    lr: float = 0.01
    batch_size: int = 64
    momentum: float = 0.9
    weight_decay: float = DEFAULT_WEIGHT_DECAY
    early_stop_acc: Optional[float] = None
    fed: Optional[FedConfig] = None

    def __post_init__(self) -> None:
        self.mode = SurrogateMode(self.mode)
        self.partition = SurrogatePartition(self.partition)
        if isinstance(self.model, dict):
            self.model = ModelSpec.from_dict(self.model)
        if isinstance(self.fed, dict):
            self.fed = FedConfig.from_dict(self.fed)
        if self.epochs < 1:
            raise InvalidArgumentError(f"surrogate epochs must be >= 1, got {self.epochs}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode.value,
            "partition": self.partition.value,
            "model": None if self.model is None else self.model.to_dict(),
            "epochs": self.epochs,
            "lr": self.lr,
            "batch_size": self.batch_size,
            "momentum": self.momentum,
            "weight_decay": self.weight_decay,
            "early_stop_acc": self.early_stop_acc,
            "fed": None if self.fed is None else self.fed.to_dict(),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "SurrogateConfig":
        return cls(**d)


@dataclass
class Scenario:
    """One attack experiment: data, clients, target training, surrogate and attack.

    ``malicious_clients`` is either an explicit id list or a count; a count is
    resolved per seed by uniform sampling. ``checkpoint_round`` attacks the
    global model snapshot of that round instead of the final one.
    """

    name: str = "scenario"
    dataset: DatasetSpec = field(default_factory=DatasetSpec)
    model: ModelSpec = field(default_factory=ModelSpec)
    num_clients: int = 10
    heterogeneity: HeterogeneityControls = field(default_factory=HeterogeneityControls)
    fed: FedConfig = field(default_factory=FedConfig)
    malicious_clients: Union[int, List[int]] = 1
    surrogate: SurrogateConfig = field(default_factory=SurrogateConfig)
    attack: AttackConfig = field(default_factory=AttackConfig)
    checkpoint_round: Optional[int] = None
    seeds: List[int] = field(default_factory=lambda: [0])

    def __post_init__(self) -> None:
        if isinstance(self.dataset, dict):
            self.dataset = DatasetSpec.from_dict(self.dataset)
        if isinstance(self.model, dict):
            self.model = ModelSpec.from_dict(self.model)
        if isinstance(self.heterogeneity, dict):
            self.heterogeneity = HeterogeneityControls.from_dict(self.heterogeneity)
        if isinstance(self.fed, dict):
            self.fed = FedConfig.from_dict(self.fed)
        if isinstance(self.surrogate, dict):
            self.surrogate = SurrogateConfig.from_dict(self.surrogate)
        if isinstance(self.attack, dict):
            self.attack = AttackConfig.from_dict(self.attack)
        self.seeds = [int(s) for s in self.seeds]
        if self.num_clients < 1:
            raise InvalidArgumentError(f"num_clients must be >= 1, got {self.num_clients}")
        if isinstance(self.malicious_clients, (list, tuple)):
            ids = sorted({int(c) for c in self.malicious_clients})
            if not ids or ids[0] < 0 or ids[-1] >= self.num_clients:
                raise InvalidArgumentError(
                    f"malicious client ids must be a nonempty subset of [0, {self.num_clients}), got {ids}"
                )
            self.malicious_clients = ids
        elif not 1 <= int(self.malicious_clients) <= self.num_clients:
            raise InvalidArgumentError(
                f"malicious client count must be in [1, {self.num_clients}], got {self.malicious_clients}"
            )
        else:
            self.malicious_clients = int(self.malicious_clients)
        if self.checkpoint_round is not None and not 1 <= self.checkpoint_round <= self.fed.rounds:
            raise InvalidArgumentError(
                f"checkpoint_round must be in [1, {self.fed.rounds}], got {self.checkpoint_round}"
            )
        if not self.seeds:
            raise InvalidArgumentError("a scenario needs at least one seed")

    def malicious_ids(self, seed: int) -> List[int]:
        """Coalition of this seed, sorted ascending.

        A count takes the first clients of one seeded permutation of all
        clients, so for a fixed seed a larger coalition contains every smaller one.
        """
        if isinstance(self.malicious_clients, list):
            return list(self.malicious_clients)
        order = derive_rng(seed, "malicious").permutation(self.num_clients)
        return sorted(int(c) for c in order[: self.malicious_clients])

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "dataset": self.dataset.to_dict(),
            "model": self.model.to_dict(),
            "num_clients": self.num_clients,
            "heterogeneity": self.heterogeneity.to_dict(),
            "fed": self.fed.to_dict(),
            "malicious_clients": self.malicious_clients,
            "surrogate": self.surrogate.to_dict(),
            "attack": self.attack.to_dict(),
            "checkpoint_round": self.checkpoint_round,
            "seeds": list(self.seeds),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "Scenario":
        return cls(**d)


def _axis_edit(scenario: Dict[str, Any], axis: SweepAxis, value: Any) -> None:
    if axis is SweepAxis.NUM_MALICIOUS:
        scenario["malicious_clients"] = int(value)
    elif axis is SweepAxis.DIRICHLET_ALPHA:
        scenario["heterogeneity"].update(scheme="dirichlet", alpha=float(value))
    elif axis is SweepAxis.UNBALANCE_SGM:
        scenario["heterogeneity"].update(scheme="unbalanced", sgm=float(value))
    elif axis is SweepAxis.MAX_CLASSES:
        scenario["heterogeneity"].update(scheme="max_classes", max_classes=int(value))
    elif axis is SweepAxis.CLIENTS_PER_ROUND:
        scenario["fed"]["clients_per_round"] = int(value)
    elif axis is SweepAxis.NUM_CLIENTS_TOTAL:
        scenario["num_clients"] = int(value)
    elif axis is SweepAxis.AGGREGATION_RULE:
        scenario["fed"]["rule"] = {"kind": value} if isinstance(value, str) else dict(value)


@dataclass
class SweepSpec:
    """A base scenario and one axis varied over ``values``; every cell runs every seed."""

    base: Scenario
    axis: SweepAxis
    values: List[Any]

    def __post_init__(self) -> None:
        if isinstance(self.base, dict):
            self.base = Scenario.from_dict(self.base)
        self.axis = SweepAxis(self.axis)
        if not self.values:
            raise InvalidArgumentError("a sweep needs at least one axis value")
        for value in self.values:
            self.apply(value)

    def apply(self, value: Any) -> Scenario:
        """The base scenario with the axis set to ``value``."""
        d = copy.deepcopy(self.base.to_dict())
        _axis_edit(d, self.axis, value)
        d["name"] = f"{self.base.name}[{self.axis.value}={json.dumps(value, sort_keys=True)}]"
        return Scenario.from_dict(d)

    def to_dict(self) -> Dict[str, Any]:
        return {"base": self.base.to_dict(), "axis": self.axis.value, "values": list(self.values)}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "SweepSpec":
        return cls(**d)


def parse_override(text: str) -> Tuple[List[str], Any]:
    """Split ``a.b.c=value``; the value is parsed as JSON, else kept as a string."""
    if "=" not in text:
        raise InvalidArgumentError(f"override '{text}' is not of the form key=value")
    key, raw = text.split("=", 1)
    path = [part for part in key.strip().split(".") if part]
    if not path:
        raise InvalidArgumentError(f"override '{text}' has an empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


def apply_overrides(config: Dict[str, Any], overrides: Sequence[str]) -> Dict[str, Any]:
    """Return a copy of ``config`` with every override applied in order."""
    result = copy.deepcopy(config)
    for text in overrides:
        path, value = parse_override(text)
        node = result
        for part in path[:-1]:
            child = node.get(part)
            if not isinstance(child, dict):
                child = {}
                node[part] = child
            node = child
        node[path[-1]] = value
    return result


def load_config(path: Union[str, Path], overrides: Sequence[str] = ()) -> Dict[str, Any]:
    """Read a JSON config file and apply ``key=value`` overrides."""
    with open(path, encoding="utf-8") as f:
        config = json.load(f)
    if not isinstance(config, dict):
        raise InvalidArgumentError(f"config {path} must hold a JSON object")
    return apply_overrides(config, overrides)


def load_scenario(path: Union[str, Path], overrides: Sequence[str] = ()) -> Scenario:
    return Scenario.from_dict(load_config(path, overrides))


def load_sweep(path: Union[str, Path], overrides: Sequence[str] = ()) -> SweepSpec:
    return SweepSpec.from_dict(load_config(path, overrides))


def axis_values_numeric(values: Sequence[Any]) -> Optional[np.ndarray]:
    """Axis values as floats, or None when any is not a number."""
    try:
        return np.array([float(v) for v in values], dtype=np.float64)
    except (TypeError, ValueError):
        return None
