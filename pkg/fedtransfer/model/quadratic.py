"""The quadratic model family ``f(theta) = sum_x (x theta)^2`` used by the theory checks."""

import numpy as np
import numpy.typing as npt

from ..errors import AssumptionViolationError, RankDeficiencyError, ShapeMismatchError

GRAM_TOL = 1e-10


def _as_design(X: npt.ArrayLike) -> npt.NDArray[np.float64]:
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.ndim != 2:
        raise ShapeMismatchError(f"X must be a matrix, got shape {X.shape}")
    return X


def quad_loss(theta: npt.ArrayLike, X: npt.ArrayLike) -> float:
    """``||X theta||^2 = theta^T X^T X theta``."""
    X = _as_design(X)
    theta = np.asarray(theta, dtype=np.float64)
    if theta.shape != (X.shape[1],):
        raise ShapeMismatchError(f"theta has shape {theta.shape}, X has {X.shape[1]} columns")
    r = X @ theta
    return float(r @ r)


def quad_grad(theta: npt.ArrayLike, X: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Gradient ``2 X^T X theta`` of :func:`quad_loss` w.r.t. theta."""
    X = _as_design(X)
    return 2.0 * X.T @ (X @ np.asarray(theta, dtype=np.float64))


def quad_input_grad(theta: npt.ArrayLike, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Gradient ``2 (x theta) theta`` of ``(x theta)^2`` w.r.t. the input x."""
    theta = np.asarray(theta, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    return 2.0 * float(x @ theta) * theta


def quad_solve(X: npt.ArrayLike, target: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Least-squares solution of ``X theta = target``.

    Raises:
        RankDeficiencyError: If X does not have full column rank.
    """
    X = _as_design(X)
    target = np.asarray(target, dtype=np.float64)
    if target.shape != (X.shape[0],):
        raise ShapeMismatchError(f"target has shape {target.shape}, X has {X.shape[0]} rows")
    rank = np.linalg.matrix_rank(X)
    if rank < X.shape[1]:
        raise RankDeficiencyError(f"X has rank {rank} < {X.shape[1]} columns")
    theta, *_ = np.linalg.lstsq(X, target, rcond=None)
    return theta


def gram_min_eigenvalue(X: npt.ArrayLike) -> float:
    """Smallest eigenvalue of ``X^T X``."""
    X = _as_design(X)
    return float(np.linalg.eigvalsh(X.T @ X)[0])


def check_gram_dominates_identity(X: npt.ArrayLike, tol: float = GRAM_TOL) -> None:
    """Require ``X^T X - I`` to be positive semidefinite.

    Raises:
        AssumptionViolationError: When the smallest eigenvalue of ``X^T X`` is below 1.
    """
    lam = gram_min_eigenvalue(X)
    if lam < 1.0 - tol:
        raise AssumptionViolationError(
            f"X^T X - I is not positive semidefinite (min eigenvalue of X^T X = {lam:.6g})"
        )
