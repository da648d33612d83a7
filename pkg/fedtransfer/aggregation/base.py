"""Base interface for server-side aggregation rules."""

from abc import ABC, abstractmethod
from typing import Any, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError, ShapeMismatchError
from ..model.params import ParamVector

Updates = Union[Sequence[ParamVector], Sequence[npt.ArrayLike], npt.NDArray[np.float64]]


def stack_updates(updates: Updates) -> Tuple[npt.NDArray[np.float64], Optional[ParamVector]]:
    """Stack K updates into a K x d matrix.

    Returns:
        ``(matrix, template)`` where ``template`` is the first update when the
        inputs are ParamVectors (used to restore the layout), else None.
    """
    items = list(updates)
    if not items:
        raise InvalidArgumentError("aggregation needs at least one update")
    template = items[0] if isinstance(items[0], ParamVector) else None
    rows = [u.values if isinstance(u, ParamVector) else np.asarray(u, dtype=np.float64) for u in items]
    rows = [np.atleast_1d(r).ravel() for r in rows]
    d = rows[0].size
    if any(r.size != d for r in rows):
        raise ShapeMismatchError(f"updates differ in length: {sorted({r.size for r in rows})}")
    return np.stack(rows), template


def wrap(vector: npt.NDArray[np.float64], template: Optional[ParamVector]):
    """Return a ParamVector shaped like ``template``, or the raw vector."""
    if template is None:
        return vector
    return template.with_values(vector)


class Aggregator(ABC):
    """Combine K client updates into one vector.

    Subclasses implement :meth:`combine` on a K x d matrix. Only fedavg uses
    the client weights; robust rules treat updates as unweighted.
    """

    name: str = "base"

    def __call__(self, updates: Updates, weights: Optional[npt.ArrayLike] = None):
        matrix, template = stack_updates(updates)
        w = None if weights is None else np.asarray(weights, dtype=np.float64)
        if w is not None and w.shape != (matrix.shape[0],):
            raise ShapeMismatchError(f"{matrix.shape[0]} updates but {w.size} weights")
        return wrap(self.combine(matrix, w), template)

    @abstractmethod
    def combine(
        self, matrix: npt.NDArray[np.float64], weights: Optional[npt.NDArray[np.float64]]
    ) -> npt.NDArray[np.float64]:
        """Aggregate the rows of ``matrix``."""
        ...

    def to_dict(self) -> Dict[str, Any]:
        d = vars(self).copy()
        d["class"] = self.name
        return d
