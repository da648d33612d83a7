"""Transferability metrics."""

from .transfer import (
    TransferReport,
    TransferSets,
    build_transfer_report,
    clean_and_adv_accuracy,
    compute_sets,
    transfer_acc,
    transfer_rate,
)

__all__ = [
    "TransferSets",
    "TransferReport",
    "compute_sets",
    "transfer_rate",
    "transfer_acc",
    "clean_and_adv_accuracy",
    "build_transfer_report",
]
