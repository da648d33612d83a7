"""Federated and centralized training loops."""

from .centralized import train_centralized
from .config import FedConfig, default_clients_per_round
from .evaluation import evaluate
from .history import HistoryRecord, TrainHistory
from .server import client_update, sample_clients, train_federated

__all__ = [
    "FedConfig",
    "default_clients_per_round",
    "TrainHistory",
    "HistoryRecord",
    "evaluate",
    "train_federated",
    "train_centralized",
    "sample_clients",
    "client_update",
]
