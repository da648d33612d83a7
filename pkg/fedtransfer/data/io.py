"""Partition JSON files."""

import json
from pathlib import Path
from typing import Union

from ..errors import InvalidArgumentError
from .partition import Partition

PathLike = Union[str, Path]


def save_partition(partition: Partition, path: PathLike) -> Path:
    """Write ``partition`` as JSON, recording the sample count it covers."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    payload = partition.to_dict()
    payload["n_total"] = partition.n_total
    target.write_text(json.dumps(payload, indent=2), encoding="utf-8")
    return target


def load_partition(path: PathLike) -> Partition:
    """Read a partition written by :func:`save_partition`.

    Full partitions are re-validated against their recorded sample count;
    client subsets (``metadata["selected_clients"]``) are not a cover and
    skip that check.

    Raises:
        FileNotFoundError: If the file does not exist.
        InvalidArgumentError: If the content is not a valid partition.
    """
    source = Path(path)
    try:
        data = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise InvalidArgumentError(f"{source} is not valid JSON: {e}") from e
    n_total = data.pop("n_total", None)
    try:
        partition = Partition.from_dict(data)
    except (KeyError, TypeError) as e:
        raise InvalidArgumentError(f"{source} is not a partition file: {e}") from e
    if n_total is not None and "selected_clients" not in partition.metadata:
        partition.validate(int(n_total))
    return partition
