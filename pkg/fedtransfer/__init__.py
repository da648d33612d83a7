"""fedtransfer: federated-learning simulator and adversarial-transferability lab."""

__version__ = "0.1.0"

__all__ = ["__version__"]
