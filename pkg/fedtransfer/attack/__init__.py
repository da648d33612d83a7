"""Adversarial example crafting and adversarial training."""

from .adversarial_training import adv_train_epochs, adversarial_batch_transform
from .batch import AdvBatch, craft_batch, load_adv_batch, save_adv_batch
from .config import AdvExample, AttackConfig, AttackStats, Norm
from .gradient import ascent_direction, fgsm, pgd, pgd_rows, project

__all__ = [
    "AttackConfig",
    "AdvExample",
    "AttackStats",
    "Norm",
    "fgsm",
    "pgd",
    "pgd_rows",
    "project",
    "ascent_direction",
    "AdvBatch",
    "craft_batch",
    "save_adv_batch",
    "load_adv_batch",
    "adv_train_epochs",
    "adversarial_batch_transform",
]
