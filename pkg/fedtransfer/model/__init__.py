"""Differentiable models, parameter vectors and SGD training."""

from .functional import (
    forward,
    grad_input,
    grad_inputs,
    grad_params,
    init_params,
    log_softmax,
    loss,
    loss_and_grad,
    per_sample_loss,
    predict,
)
from .networks import NETWORK_REGISTRY, build_network
from .params import ParamVector, load_params, params_digest, save_params
from .quadratic import (
    check_gram_dominates_identity,
    gram_min_eigenvalue,
    quad_grad,
    quad_input_grad,
    quad_loss,
    quad_solve,
)
from .spec import Batch, ModelKind, ModelSpec
from .training import DEFAULT_WEIGHT_DECAY, SGDTrainer, sgd_epochs

__all__ = [
    "ModelKind",
    "ModelSpec",
    "Batch",
    "ParamVector",
    "save_params",
    "load_params",
    "params_digest",
    "NETWORK_REGISTRY",
    "build_network",
    "init_params",
    "forward",
    "predict",
    "loss",
    "per_sample_loss",
    "loss_and_grad",
    "grad_params",
    "grad_input",
    "grad_inputs",
    "log_softmax",
    "DEFAULT_WEIGHT_DECAY",
    "SGDTrainer",
    "sgd_epochs",
    "quad_loss",
    "quad_grad",
    "quad_input_grad",
    "quad_solve",
    "gram_min_eigenvalue",
    "check_gram_dominates_identity",
]
