"""Empirical estimates of the smoothness, convexity and gradient constants of a federated problem."""

from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Tuple

import numpy as np
import numpy.typing as npt
from scipy import optimize

from ..data.dataset import Dataset
from ..data.partition import Partition
from ..errors import InvalidArgumentError, NonConvexModelError
from ..logging_utils import get_logger
from ..model.functional import init_params, loss_and_grad
from ..model.params import ParamVector
from ..model.spec import Batch, ModelKind, ModelSpec
from ..rng import derive_rng

logger = get_logger(__name__)

CONVEX_KINDS = (ModelKind.SOFTMAX_LINEAR, ModelKind.QUADRATIC)
POWER_TOL = 1e-8
POWER_MAX_ITER = 500
HVP_STEP = 1e-4
OPTIMUM_GTOL = 1e-10

Objective = Callable[[npt.NDArray[np.float64]], Tuple[float, npt.NDArray[np.float64]]]


@dataclass
class TheoryConstants:
    """Constants of the FedAvg convergence bound and the transferability lower bound.

    ``kappa``, ``gamma``, ``B`` and ``C`` are derived from the stored fields.
    ``procedures`` records how each estimate was obtained; ``warnings``
    collects non-convergence notes.
    """

    L: float
    mu: float
    sigma_k: Tuple[float, ...]
    p_k: Tuple[float, ...]
    G: float
    Gamma: float
    E: int
    K: int
    T: int
    theta1_dist_sq: float
    theta_star_sq: float
    procedures: Dict[str, str] = field(default_factory=dict)
    warnings: List[str] = field(default_factory=list)

    def __post_init__(self) -> None:
        self.sigma_k = tuple(float(s) for s in self.sigma_k)
        self.p_k = tuple(float(p) for p in self.p_k)
        if not self.mu > 0:
            raise InvalidArgumentError(f"mu must be > 0, got {self.mu}")
        if self.L < self.mu:
            raise InvalidArgumentError(f"L ({self.L}) must be >= mu ({self.mu})")
        if self.Gamma < 0:
            raise InvalidArgumentError(f"Gamma must be >= 0, got {self.Gamma}")
        if len(self.sigma_k) != len(self.p_k):
            raise InvalidArgumentError("sigma_k and p_k must have one entry per client")
        if min(self.E, self.K, self.T) < 1:
            raise InvalidArgumentError("E, K and T must be >= 1")

    @property
    def kappa(self) -> float:
        return self.L / self.mu

    @property
    def gamma(self) -> float:
        return max(8.0 * self.kappa, float(self.E))

    @property
    def B(self) -> float:
        noise = float(np.sum(np.square(self.p_k) * np.square(self.sigma_k)))
        return noise + 6.0 * self.L * self.Gamma + 8.0 * (self.E - 1) ** 2 * self.G**2

    @property
    def C(self) -> float:
        return 4.0 / self.K * self.E**2 * self.G**2

    def centralized(self) -> "TheoryConstants":
        """The same problem with E = 1 and K = 1."""
        return replace(self, E=1, K=1, procedures=dict(self.procedures), warnings=list(self.warnings))

    def with_gamma(self, Gamma: float) -> "TheoryConstants":
        return replace(self, Gamma=Gamma, procedures=dict(self.procedures), warnings=list(self.warnings))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "L": self.L,
            "mu": self.mu,
            "sigma_k": list(self.sigma_k),
            "p_k": list(self.p_k),
            "G": self.G,
            "Gamma": self.Gamma,
            "E": self.E,
            "K": self.K,
            "T": self.T,
            "theta1_dist_sq": self.theta1_dist_sq,
            "theta_star_sq": self.theta_star_sq,
            "kappa": self.kappa,
            "gamma": self.gamma,
            "B": self.B,
            "C": self.C,
            "procedures": dict(self.procedures),
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "TheoryConstants":
        derived = {"kappa", "gamma", "B", "C"}
        return cls(**{k: v for k, v in d.items() if k not in derived})


def regularized_objective(
    spec: ModelSpec, dataset: Dataset, indices: npt.ArrayLike, weight_decay: float
) -> Objective:
    """``theta -> (loss + weight_decay/2 ||theta||^2, gradient)`` on ``dataset[indices]``."""
    idx = np.asarray(indices, dtype=np.int64)
    batch = Batch(dataset.features[idx], dataset.labels[idx])
    layout = tuple(spec.layout())

    def objective(theta: npt.NDArray[np.float64]) -> Tuple[float, npt.NDArray[np.float64]]:
        value, grad = loss_and_grad(spec, ParamVector(theta, layout), batch)
        return (
            value + 0.5 * weight_decay * float(theta @ theta),
            grad.values + weight_decay * theta,
        )

    return objective


def minimize_objective(
    objective: Objective, x0: npt.NDArray[np.float64], what: str, warnings: List[str]
) -> Tuple[npt.NDArray[np.float64], float]:
    """Minimize with L-BFGS; a failed run is logged and noted in ``warnings``."""
    result = optimize.minimize(
        objective, x0, jac=True, method="L-BFGS-B", options={"gtol": OPTIMUM_GTOL, "maxiter": 10_000}
    )
    if not result.success:
        message = f"minimizing {what} did not converge: {result.message}"
        logger.warning(message)
        warnings.append(message)
    return np.asarray(result.x, dtype=np.float64), float(result.fun)


def hessian_vector_product(
    objective: Objective, theta: npt.NDArray[np.float64], v: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    """Central finite difference of gradients along ``v``."""
    g_plus = objective(theta + HVP_STEP * v)[1]
    g_minus = objective(theta - HVP_STEP * v)[1]
    return (g_plus - g_minus) / (2.0 * HVP_STEP)


def power_iteration(
    apply: Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]],
    dim: int,
    rng: np.random.Generator,
    tol: float = POWER_TOL,
    max_iter: int = POWER_MAX_ITER,
) -> Tuple[float, bool]:
    """Dominant eigenvalue of a symmetric PSD operator.

    Returns:
        ``(eigenvalue, converged)``; the operator mapping the iterate to zero yields ``(0, True)``.
    """
    v = rng.standard_normal(dim)
    v /= np.linalg.norm(v)
    value = 0.0
    for _ in range(max_iter):
        w = apply(v)
        norm = float(np.linalg.norm(w))
        if norm == 0.0:
            return 0.0, True
        new_value = float(v @ w)
        v = w / norm
        if abs(new_value - value) <= tol * max(abs(new_value), 1e-300):
            return new_value, True
        value = new_value
    return value, False


def estimate_constants(
    spec: ModelSpec,
    dataset: Dataset,
    partition: Partition,
    E: int,
    K: int,
    T: int,
    samples: int,
    seed: int,
    batch_size: int = 50,
    lr: float = 0.1,
    weight_decay: float = 1e-3,
) -> TheoryConstants:
    """Estimate L, mu, sigma_k, G, Gamma and the initial distance for a convex model.

    The objective is the model loss plus ``weight_decay/2 ||theta||^2``.

    * ``theta_star`` and every client optimum come from L-BFGS.
    * L is the top Hessian eigenvalue at ``theta_star`` by power iteration on
      finite-difference Hessian-vector products; mu is ``L`` minus the top
      eigenvalue of ``L I - H``.
    * ``sigma_k`` is the root mean squared deviation of client-k minibatch
      gradients from the full client gradient at ``theta_star``.
    * G is the largest minibatch gradient norm at points drawn on the segment
      from the initialization to ``theta_star``.
    * ``Gamma = l_star - sum_k p_k l_k_star`` (clipped at 0).
    * ``theta1_dist_sq`` averages ``||theta_1 - theta_star||^2`` over one
      minibatch SGD step from ``init_params(spec, seed)``.

    Raises:
        NonConvexModelError: For model kinds other than softmax_linear and quadratic.
    """
    if spec.kind not in CONVEX_KINDS:
        raise NonConvexModelError(
            f"constants can only be estimated for convex kinds "
            f"({', '.join(k.value for k in CONVEX_KINDS)}), got {spec.kind.value}"
        )
    if samples < 1:
        raise InvalidArgumentError(f"samples must be >= 1, got {samples}")
    warnings: List[str] = []
    rng = derive_rng(seed, "theory", "constants")
    all_idx = np.concatenate(partition.assignments)
    objective = regularized_objective(spec, dataset, all_idx, weight_decay)
    theta0 = init_params(spec, seed).values
    dim = theta0.size

    theta_star, l_star = minimize_objective(objective, theta0, "the global objective", warnings)

    L, ok_L = power_iteration(lambda v: hessian_vector_product(objective, theta_star, v), dim, rng)
    top_shifted, ok_mu = power_iteration(
        lambda v: L * v - hessian_vector_product(objective, theta_star, v), dim, rng
    )
    mu = L - max(top_shifted, 0.0)
    if not (ok_L and ok_mu):
        message = "Hessian power iteration did not converge"
        logger.warning(message)
        warnings.append(message)

    client_optima = []
    sigma_k = []
    for k, idx in enumerate(partition.assignments):
        client_obj = regularized_objective(spec, dataset, idx, weight_decay)
        _, l_k = minimize_objective(client_obj, theta_star, f"client {k}", warnings)
        client_optima.append(l_k)
        full_grad = client_obj(theta_star)[1]
        dev = []
        for _ in range(samples):
            rows = rng.choice(idx, size=min(batch_size, idx.size), replace=False)
            g = regularized_objective(spec, dataset, rows, weight_decay)(theta_star)[1]
            dev.append(float(np.sum((g - full_grad) ** 2)))
        sigma_k.append(float(np.sqrt(np.mean(dev))))

    Gamma = l_star - float(np.dot(partition.weights, client_optima))
    if Gamma < 0:
        Gamma = 0.0

    g_sq = 0.0
    for _ in range(samples):
        point = theta0 + rng.uniform() * (theta_star - theta0)
        k = int(rng.choice(partition.num_clients, p=partition.weights))
        idx = partition.assignments[k]
        rows = rng.choice(idx, size=min(batch_size, idx.size), replace=False)
        g = regularized_objective(spec, dataset, rows, weight_decay)(point)[1]
        g_sq = max(g_sq, float(g @ g))

    dist = []
    for _ in range(samples):
        rows = rng.choice(all_idx, size=min(batch_size, all_idx.size), replace=False)
        theta1 = theta0 - lr * regularized_objective(spec, dataset, rows, weight_decay)(theta0)[1]
        dist.append(float(np.sum((theta1 - theta_star) ** 2)))

    logger.info("Estimated constants: L=%.4g mu=%.4g G=%.4g Gamma=%.4g", L, mu, np.sqrt(g_sq), Gamma)
    return TheoryConstants(
        L=L,
        mu=mu,
        sigma_k=tuple(sigma_k),
        p_k=tuple(partition.weights),
        G=float(np.sqrt(g_sq)),
        Gamma=Gamma,
        E=E,
        K=K,
        T=T,
        theta1_dist_sq=float(np.mean(dist)),
        theta_star_sq=float(theta_star @ theta_star),
        procedures={
            "objective": f"model loss + {weight_decay}/2 ||theta||^2",
            "theta_star": "L-BFGS on the pooled client data",
            "L": "power iteration on finite-difference Hessian-vector products at theta_star",
            "mu": "L minus the top eigenvalue of L*I - H at theta_star",
            "sigma_k": f"RMS deviation of {samples} minibatch gradients (size {batch_size}) per client at theta_star",
            "G": f"max minibatch gradient norm over {samples} points between init and theta_star",
            "Gamma": "l_star - sum_k p_k l_k_star with L-BFGS client optima",
            "theta1_dist_sq": f"mean over {samples} one-step SGD draws (lr {lr}) from the initialization",
        },
        warnings=warnings,
    )
