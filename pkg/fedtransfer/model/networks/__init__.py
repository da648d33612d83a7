"""Network registry."""

from typing import Dict, Type

from ...errors import UnsupportedModelError
from ..spec import ModelSpec
from .base import Network
from .mlp import MLP
from .softmax_linear import SoftmaxLinear

# Registry mapping model kinds to network classes
NETWORK_REGISTRY: Dict[str, Type[Network]] = {
    SoftmaxLinear.name: SoftmaxLinear,
    MLP.name: MLP,
}


def build_network(spec: ModelSpec) -> Network:
    """Instantiate the network for ``spec.kind``.

    Raises:
        UnsupportedModelError: If the kind has no classifier network.
    """
    if spec.kind.value not in NETWORK_REGISTRY:
        available = ", ".join(NETWORK_REGISTRY.keys())
        raise UnsupportedModelError(
            f"Model kind '{spec.kind.value}' has no classifier network. Available: {available}"
        )
    return NETWORK_REGISTRY[spec.kind.value](spec)


__all__ = ["Network", "SoftmaxLinear", "MLP", "NETWORK_REGISTRY", "build_network"]
