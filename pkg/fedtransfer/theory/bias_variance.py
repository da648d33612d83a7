"""Monte Carlo bias-variance decomposition of model ensembles on adversarial probes."""

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError
from ..logging_utils import get_logger
from ..rng import derive_rng

logger = get_logger(__name__)

Arrays = Tuple[npt.NDArray[np.float64], npt.NDArray[np.float64]]
Predictor = Callable[[npt.NDArray[np.float64]], npt.NDArray[np.float64]]
Generator = Callable[[np.random.Generator], Arrays]
Trainer = Callable[[npt.NDArray[np.float64], npt.NDArray[np.float64]], Predictor]
Crafter = Callable[[np.random.Generator], Arrays]


@dataclass
class BiasVarianceReport:
    """Squared bias, single-model variance and ensemble errors on a fixed probe set.

    Each ``*_stderr`` entry is the standard error over trials of its estimate.
    """

    bias_sq: float
    variance_single: float
    variance_single_stderr: float
    trials: int
    mse_ensemble: Dict[int, float] = field(default_factory=dict)
    mse_stderr: Dict[int, float] = field(default_factory=dict)
    variance_ensemble: Dict[int, float] = field(default_factory=dict)
    variance_ensemble_stderr: Dict[int, float] = field(default_factory=dict)

    def predicted_mse(self, n: int) -> float:
        """``bias^2 + variance_single / n``."""
        return self.bias_sq + self.variance_single / n

    def residual(self, n: int) -> float:
        return abs(self.mse_ensemble[n] - self.predicted_mse(n))

    def residual_stderr(self, n: int) -> float:
        """Standard error of :meth:`residual`, its two estimates taken as independent.

        Shrinks like ``1 / sqrt(trials)``.
        """
        return float(np.hypot(self.mse_stderr[n], self.variance_single_stderr / n))

    def to_dict(self) -> Dict[str, Any]:
        sizes = sorted(self.mse_ensemble)
        return {
            "bias_sq": self.bias_sq,
            "variance_single": self.variance_single,
            "variance_single_stderr": self.variance_single_stderr,
            "trials": self.trials,
            "ensembles": [
                {
                    "n": n,
                    "mse": self.mse_ensemble[n],
                    "mse_stderr": self.mse_stderr[n],
                    "variance": self.variance_ensemble[n],
                    "variance_stderr": self.variance_ensemble_stderr[n],
                    "predicted_mse": self.predicted_mse(n),
                }
                for n in sizes
            ],
        }


def _stderr(values: npt.NDArray[np.float64]) -> float:
    return float(values.std(ddof=1) / np.sqrt(values.size)) if values.size > 1 else 0.0


def bias_variance_mc(
    generator: Generator,
    model_trainer: Trainer,
    ensemble_sizes: Sequence[int],
    trials: int,
    adv_crafter: Crafter,
    seed: int,
) -> BiasVarianceReport:
    """Estimate the ensemble bias-variance decomposition by Monte Carlo.

    The probe set ``(x', y)`` comes from one call of ``adv_crafter``. Each
    trial trains ``max(ensemble_sizes)`` models on fresh datasets from
    ``generator`` (one derived stream per model) and averages the first n of
    them for every ensemble size n. The mean model over all trials stands in
    for the expected model.

    Args:
        generator: ``rng -> (X, y)`` training set.
        model_trainer: ``(X, y) -> predictor``; deterministic given the data.
        ensemble_sizes: Ensemble sizes n to evaluate (each >= 1).
        trials: Number of Monte Carlo trials (>= 2).
        adv_crafter: ``rng -> (x', y)`` fixed probe set.
        seed: Seed of every random stream.
    """
    sizes = sorted({int(n) for n in ensemble_sizes})
    if not sizes or sizes[0] < 1:
        raise InvalidArgumentError(f"ensemble sizes must be >= 1, got {list(ensemble_sizes)}")
    if trials < 2:
        raise InvalidArgumentError(f"trials must be >= 2, got {trials}")
    probe_x, probe_y = adv_crafter(derive_rng(seed, "bias_variance", "probes"))
    probe_y = np.asarray(probe_y, dtype=np.float64)
    n_max = sizes[-1]

    # predictions[t, i] holds model i of trial t on every probe
    predictions = np.empty((trials, n_max, probe_y.size))
    for t in range(trials):
        for i in range(n_max):
            X, y = generator(derive_rng(seed, "bias_variance", "data", t, i))
            predictions[t, i] = np.asarray(model_trainer(X, y)(probe_x), dtype=np.float64).ravel()

    mean_model = predictions.mean(axis=(0, 1))
    bias_sq = float(np.mean((probe_y - mean_model) ** 2))
    per_model_var = np.mean((predictions - mean_model) ** 2, axis=2)
    report = BiasVarianceReport(
        bias_sq=bias_sq,
        variance_single=float(per_model_var.mean()),
        variance_single_stderr=_stderr(per_model_var.ravel()),
        trials=trials,
    )
    for n in sizes:
        ensemble = predictions[:, :n].mean(axis=1)
        err = np.mean((probe_y - ensemble) ** 2, axis=1)
        var = np.mean((ensemble - mean_model) ** 2, axis=1)
        report.mse_ensemble[n] = float(err.mean())
        report.mse_stderr[n] = _stderr(err)
        report.variance_ensemble[n] = float(var.mean())
        report.variance_ensemble_stderr[n] = _stderr(var)
    logger.info(
        "Bias-variance over %d trials: bias^2=%.4g variance=%.4g", trials, bias_sq, report.variance_single
    )
    return report


@dataclass(frozen=True)
class LinearRegressionFamily:
    """Noisy linear data ``y = X w + noise``, least-squares models and sign-gradient probes.

    Probes are shifted by ``epsilon`` along the sign of the input gradient of
    the squared error under the true weights, with clean targets kept.
    """

    dim: int = 5
    n_train: int = 20
    noise: float = 1.0
    n_probes: int = 50
    epsilon: float = 0.5
    weight_seed: int = 0

    @property
    def weights(self) -> npt.NDArray[np.float64]:
        return derive_rng(self.weight_seed, "linear_family", "weights").standard_normal(self.dim)

    def generate(self, rng: np.random.Generator) -> Arrays:
        X = rng.standard_normal((self.n_train, self.dim))
        return X, X @ self.weights + self.noise * rng.standard_normal(self.n_train)

    @staticmethod
    def train(X: npt.NDArray[np.float64], y: npt.NDArray[np.float64]) -> Predictor:
        w, *_ = np.linalg.lstsq(X, y, rcond=None)
        return lambda probes: probes @ w

    def craft_probes(self, rng: np.random.Generator) -> Arrays:
        w = self.weights
        x = rng.standard_normal((self.n_probes, self.dim))
        y = x @ w + self.noise * rng.standard_normal(self.n_probes)
        # d/dx (y - x w)^2 = -2 (y - x w) w
        grad = -2.0 * (y - x @ w)[:, None] * w[None, :]
        return x + self.epsilon * np.sign(grad), y

    def run(self, ensemble_sizes: Sequence[int], trials: int, seed: int) -> BiasVarianceReport:
        return bias_variance_mc(self.generate, self.train, ensemble_sizes, trials, self.craft_probes, seed)
