"""Closed-form transferability lower bound and its numerical check on the quadratic family."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import numpy.typing as npt

from ..errors import BoundUnderflowError, InvalidArgumentError
from ..logging_utils import get_logger
from ..model.quadratic import check_gram_dominates_identity, quad_loss, quad_solve
from .alignment import cosine
from .constants import TheoryConstants

logger = get_logger(__name__)

# Loss gaps at or below this are the degenerate theta' -> theta_star case.
MIN_LOSS_GAP = 1e-12
CHECK_TOL = 1e-9


@dataclass(frozen=True)
class BoundReport:
    """Federated bound, its E = K = 1 (centralized) counterpart and their parts."""

    value: float
    corollary: float
    numerator: float
    denominator: float
    corollary_numerator: float
    corollary_denominator: float
    B: float
    C: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value,
            "corollary": self.corollary,
            "numerator": self.numerator,
            "denominator": self.denominator,
            "corollary_numerator": self.corollary_numerator,
            "corollary_denominator": self.corollary_denominator,
            "B": self.B,
            "C": self.C,
        }


def _bound_parts(c: TheoryConstants):
    numerator = 2.0 * c.mu * (c.gamma + c.T - 1) * c.theta_star_sq
    denominator = 4.0 * (c.B + c.C) * c.kappa + c.mu**2 * c.gamma * c.kappa * c.theta1_dist_sq
    if not np.isfinite(denominator) or denominator <= np.finfo(np.float64).tiny:
        raise BoundUnderflowError(f"bound denominator underflowed ({denominator!r})")
    return numerator, denominator


def theorem1_bound(constants: TheoryConstants) -> BoundReport:
    """``2 mu (gamma + T - 1) theta*^T theta* / (4 (B + C) kappa + mu^2 gamma kappa E||theta_1 - theta*||^2)``.

    Raises:
        BoundUnderflowError: If either denominator is not a positive normal float.
    """
    num, den = _bound_parts(constants)
    c_num, c_den = _bound_parts(constants.centralized())
    return BoundReport(num / den, c_num / c_den, num, den, c_num, c_den, constants.B, constants.C)


@dataclass
class EmpiricalCheckReport:
    """Instance-by-instance check of ``R(theta*, theta') >= theta*^T theta* / (l(theta') - L*)``.

    ``final_holds`` counts the final inequality; ``loss_gap_step_holds``
    counts ``l(theta') - L* >= ||theta'|| ||theta*||`` and
    ``inner_product_step_holds`` counts ``theta*^T theta' >= theta*^T theta*``.
    """

    checked: int = 0
    skipped: int = 0
    final_holds: int = 0
    loss_gap_step_holds: int = 0
    inner_product_step_holds: int = 0
    violations: List[Dict[str, float]] = field(default_factory=list)

    @property
    def fraction_holding(self) -> Optional[float]:
        return self.final_holds / self.checked if self.checked else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "checked": self.checked,
            "skipped": self.skipped,
            "final_holds": self.final_holds,
            "fraction_holding": self.fraction_holding,
            "loss_gap_step_holds": self.loss_gap_step_holds,
            "inner_product_step_holds": self.inner_product_step_holds,
            "violations": list(self.violations),
        }


def construct_theta_prime(X: npt.ArrayLike, theta_star: npt.ArrayLike, gap: float) -> npt.NDArray[np.float64]:
    """Least-squares ``theta'`` with ``X theta' ~ sqrt((X theta*)^2 + gap)``."""
    X = np.asarray(X, dtype=np.float64)
    target = np.sqrt((X @ np.asarray(theta_star, dtype=np.float64)) ** 2 + gap)
    return quad_solve(X, target)


def theorem1_empirical_check(
    X: npt.ArrayLike,
    theta_star: npt.ArrayLike,
    fed_losses: Sequence[float],
    report: Optional[EmpiricalCheckReport] = None,
) -> EmpiricalCheckReport:
    """Check the lower bound on R for each federated loss value ``l(theta')``.

    For every loss ``theta'`` is constructed from the loss gap
    ``l(theta') - L*`` and both chained steps plus the final inequality are
    evaluated. Gaps of at most ``MIN_LOSS_GAP`` are skipped. Violations of
    the final inequality are recorded and logged as they are.

    Raises:
        AssumptionViolationError: If ``X^T X - I`` is not positive semidefinite.
    """
    X = np.asarray(X, dtype=np.float64)
    theta_star = np.asarray(theta_star, dtype=np.float64)
    check_gram_dominates_identity(X)
    if not np.any(theta_star):
        raise InvalidArgumentError("theta_star must be nonzero")
    report = report if report is not None else EmpiricalCheckReport()
    l_star = quad_loss(theta_star, X)
    star_sq = float(theta_star @ theta_star)

    for value in fed_losses:
        gap = float(value) - l_star
        if gap <= MIN_LOSS_GAP:
            report.skipped += 1
            continue
        theta_prime = construct_theta_prime(X, theta_star, gap)
        r = cosine(theta_star, theta_prime)
        rhs = star_sq / gap
        report.checked += 1
        if gap + CHECK_TOL >= np.linalg.norm(theta_prime) * np.sqrt(star_sq):
            report.loss_gap_step_holds += 1
        if float(theta_star @ theta_prime) + CHECK_TOL >= star_sq:
            report.inner_product_step_holds += 1
        if r + CHECK_TOL >= rhs:
            report.final_holds += 1
        else:
            violation = {"loss": float(value), "L_star": l_star, "R": r, "rhs": rhs}
            report.violations.append(violation)
            logger.warning("Lower bound violated: %s", violation)
    return report
