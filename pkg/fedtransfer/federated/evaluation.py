"""Clean accuracy of a model."""

from typing import Optional, Sequence

import numpy as np

from ..data.dataset import Dataset
from ..errors import InvalidArgumentError
from ..model.functional import predict
from ..model.params import ParamVector
from ..model.spec import ModelSpec


def evaluate(
    spec: ModelSpec,
    params: ParamVector,
    dataset: Dataset,
    indices: Optional[Sequence[int]] = None,
) -> float:
    """Fraction of argmax-correct predictions on ``indices`` (all rows when None).

    Raises:
        InvalidArgumentError: If the index set is empty.
    """
    idx = np.arange(dataset.n) if indices is None else np.asarray(indices, dtype=np.int64)
    if idx.size == 0:
        raise InvalidArgumentError("cannot evaluate on an empty index set")
    predictions = predict(spec, params, dataset.features[idx])
    return float(np.mean(predictions == dataset.labels[idx]))
