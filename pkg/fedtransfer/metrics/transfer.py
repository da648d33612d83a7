"""Transferability sets and the four reported metrics.

For evaluation samples x_i with labels y_i, source f' and target f:

    s1: f'(x_i) = y_i          (source correct on clean)
    s2: f'(adv(x_i)) != y_i    (source fooled by its own example)
    s3: f(x_i) = y_i           (target correct on clean)
    s4: f(adv(x_i)) != y_i     (target fooled by the transferred example)

T.Rate = |s1 & s2 & s3 & s4| / |s1 & s2 & s3| and T.Acc = 1 - |s4| / n.
"""

from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Optional

import numpy as np

from ..attack.batch import AdvBatch
from ..data.dataset import Dataset
from ..errors import AlignmentError, InvalidArgumentError
from ..model.functional import predict
from ..model.params import ParamVector
from ..model.spec import ModelSpec


@dataclass(frozen=True)
class TransferSets:
    """Positions (0..n_total-1 in evaluation order) belonging to each set."""

    s1: FrozenSet[int]
    s2: FrozenSet[int]
    s3: FrozenSet[int]
    s4: FrozenSet[int]
    n_total: int

    def __post_init__(self) -> None:
        for name in ("s1", "s2", "s3", "s4"):
            members = getattr(self, name)
            if any(i < 0 or i >= self.n_total for i in members):
                raise InvalidArgumentError(f"{name} holds indices outside [0, {self.n_total})")

    @property
    def s123(self) -> FrozenSet[int]:
        return self.s1 & self.s2 & self.s3

    @property
    def s1234(self) -> FrozenSet[int]:
        return self.s123 & self.s4

    def counts(self) -> Dict[str, int]:
        """Cardinality of every set and of the intersections used by the metrics."""
        return {
            "n_total": self.n_total,
            "s1": len(self.s1),
            "s2": len(self.s2),
            "s3": len(self.s3),
            "s4": len(self.s4),
            "s1_s2": len(self.s1 & self.s2),
            "s1_s2_s3": len(self.s123),
            "s1_s2_s3_s4": len(self.s1234),
        }


def _check_alignment(dataset: Dataset, adv_batch: AdvBatch) -> None:
    if len(adv_batch) != dataset.n:
        raise AlignmentError(
            f"adversarial batch has {len(adv_batch)} examples, evaluation set has {dataset.n}"
        )
    if not np.array_equal(adv_batch.labels, dataset.labels):
        raise AlignmentError("adversarial batch labels do not match the evaluation labels")
    if not np.array_equal(adv_batch.original, dataset.features):
        raise AlignmentError("adversarial batch originals do not match the evaluation features")


def _positions(mask: np.ndarray) -> FrozenSet[int]:
    return frozenset(int(i) for i in np.flatnonzero(mask))


def compute_sets(
    source_spec: ModelSpec,
    source_params: ParamVector,
    target_spec: ModelSpec,
    target_params: ParamVector,
    eval_dataset: Dataset,
    adv_batch: AdvBatch,
) -> TransferSets:
    """Compute s1..s4 for a source-crafted batch aligned with ``eval_dataset``.

    Raises:
        AlignmentError: If the batch does not match the dataset row for row.
    """
    _check_alignment(eval_dataset, adv_batch)
    y = eval_dataset.labels
    src_clean = predict(source_spec, source_params, eval_dataset.features)
    src_adv = predict(source_spec, source_params, adv_batch.perturbed)
    tgt_clean = predict(target_spec, target_params, eval_dataset.features)
    tgt_adv = predict(target_spec, target_params, adv_batch.perturbed)
    return TransferSets(
        s1=_positions(src_clean == y),
        s2=_positions(src_adv != y),
        s3=_positions(tgt_clean == y),
        s4=_positions(tgt_adv != y),
        n_total=eval_dataset.n,
    )


def transfer_rate(sets: TransferSets) -> Optional[float]:
    """``|s1&s2&s3&s4| / |s1&s2&s3|``, or None when the denominator is empty."""
    denominator = len(sets.s123)
    if denominator == 0:
        return None
    return len(sets.s1234) / denominator


def transfer_acc(sets: TransferSets) -> float:
    """``1 - |s4| / n_total``."""
    if sets.n_total <= 0:
        raise InvalidArgumentError("transfer accuracy needs a non-empty evaluation set")
    return 1.0 - len(sets.s4) / sets.n_total


def clean_and_adv_accuracy(
    target_spec: ModelSpec,
    target_params: ParamVector,
    eval_dataset: Dataset,
    adv_batch: AdvBatch,
):
    """Clean accuracy and accuracy on ``adv_batch`` (crafted against the target for white-box rows).

    Returns:
        ``(acc, adv_acc)``.
    """
    _check_alignment(eval_dataset, adv_batch)
    y = eval_dataset.labels
    acc = float(np.mean(predict(target_spec, target_params, eval_dataset.features) == y))
    adv_acc = float(np.mean(predict(target_spec, target_params, adv_batch.perturbed) == y))
    return acc, adv_acc


@dataclass
class TransferReport:
    """Accuracy, white-box adversarial accuracy, T.Acc and T.Rate with all set counts."""

    acc_target: float
    adv_acc_target: float
    t_acc: float
    t_rate: Optional[float]
    counts: Dict[str, int]

    @property
    def t_rate_defined(self) -> bool:
        return self.t_rate is not None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "acc_target": self.acc_target,
            "adv_acc_target": self.adv_acc_target,
            "t_acc": self.t_acc,
            "t_rate": self.t_rate,
            "t_rate_defined": self.t_rate_defined,
            "counts": dict(self.counts),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "TransferReport":
        return cls(d["acc_target"], d["adv_acc_target"], d["t_acc"], d["t_rate"], dict(d["counts"]))


def build_transfer_report(
    source_spec: ModelSpec,
    source_params: ParamVector,
    target_spec: ModelSpec,
    target_params: ParamVector,
    eval_dataset: Dataset,
    transfer_batch: AdvBatch,
    whitebox_batch: AdvBatch,
) -> TransferReport:
    """Assemble a TransferReport.

    ``transfer_batch`` is crafted on the source; ``whitebox_batch`` is crafted
    on the target and only feeds ``adv_acc_target``.
    """
    sets = compute_sets(
        source_spec, source_params, target_spec, target_params, eval_dataset, transfer_batch
    )
    acc, adv_acc = clean_and_adv_accuracy(target_spec, target_params, eval_dataset, whitebox_batch)
    return TransferReport(
        acc_target=acc,
        adv_acc_target=adv_acc,
        t_acc=transfer_acc(sets),
        t_rate=transfer_rate(sets),
        counts=sets.counts(),
    )
