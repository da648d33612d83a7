"""Flat parameter vectors and their binary persistence."""

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Tuple, Union

import numpy as np
import numpy.typing as npt

from ..errors import InvalidArgumentError, ShapeMismatchError
from .spec import Layout

BLOB_DTYPE = "<f8"


@dataclass(frozen=True, eq=False)
class ParamVector:
    """Flat float64 parameters plus the layout mapping them onto tensors.

    Instances are treated as immutable values: ``values`` is marked read-only
    and every update produces a new vector.
    """

    values: npt.NDArray[np.float64]
    layout: Tuple[Tuple[str, Tuple[int, ...]], ...]

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64).ravel()
        layout = tuple((str(name), tuple(int(s) for s in shape)) for name, shape in self.layout)
        expected = int(sum(np.prod(shape) for _, shape in layout))
        if values.size != expected:
            raise ShapeMismatchError(
                f"parameter vector has length {values.size}, layout needs {expected}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidArgumentError("parameter values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "layout", layout)

    @classmethod
    def zeros(cls, layout: Layout) -> "ParamVector":
        size = int(sum(np.prod(shape) for _, shape in layout))
        return cls(np.zeros(size), tuple(layout))

    @classmethod
    def from_tensors(cls, tensors: Dict[str, np.ndarray], layout: Layout) -> "ParamVector":
        """Concatenate named tensors in layout order."""
        parts = []
        for name, shape in layout:
            arr = np.asarray(tensors[name], dtype=np.float64)
            if arr.shape != tuple(shape):
                raise ShapeMismatchError(f"tensor '{name}' has shape {arr.shape}, expected {shape}")
            parts.append(arr.ravel())
        return cls(np.concatenate(parts) if parts else np.zeros(0), tuple(layout))

    def tensors(self) -> Dict[str, npt.NDArray[np.float64]]:
        """Read-only views of each named tensor."""
        out = {}
        offset = 0
        for name, shape in self.layout:
            size = int(np.prod(shape))
            out[name] = self.values[offset : offset + size].reshape(shape)
            offset += size
        return out

    def with_values(self, values: npt.ArrayLike) -> "ParamVector":
        """Same layout, new values."""
        return ParamVector(np.asarray(values, dtype=np.float64), self.layout)

    def __len__(self) -> int:
        return int(self.values.size)

    def layout_dict(self):
        return [[name, list(shape)] for name, shape in self.layout]


def save_params(params: ParamVector, path: Union[str, Path]) -> Tuple[Path, Path]:
    """Write ``<path>.bin`` (little-endian float64) and the ``<path>.json`` layout sidecar.

    Args:
        params: Parameters to save.
        path: Destination path without extension.

    Returns:
        ``(blob_path, sidecar_path)``.
    """
    base = Path(path)
    base.parent.mkdir(parents=True, exist_ok=True)
    blob = params.values.astype(BLOB_DTYPE).tobytes()
    blob_path = base.with_name(base.name + ".bin")
    sidecar_path = base.with_name(base.name + ".json")
    blob_path.write_bytes(blob)
    sidecar = {
        "dtype": "float64",
        "byte_order": "little",
        "length": len(params),
        "layout": params.layout_dict(),
        "sha256": hashlib.sha256(blob).hexdigest(),
    }
    with open(sidecar_path, "w", encoding="utf-8") as f:
        json.dump(sidecar, f, indent=2)
    return blob_path, sidecar_path


def load_params(path: Union[str, Path]) -> ParamVector:
    """Load parameters written by :func:`save_params`.

    Raises:
        FileNotFoundError: If either file is missing.
        ShapeMismatchError: If the blob length disagrees with the sidecar.
    """
    base = Path(path)
    if base.suffix in (".bin", ".json"):
        base = base.with_suffix("")
    with open(base.with_name(base.name + ".json"), encoding="utf-8") as f:
        sidecar = json.load(f)
    raw = base.with_name(base.name + ".bin").read_bytes()
    values = np.frombuffer(raw, dtype=BLOB_DTYPE).astype(np.float64)
    if values.size != sidecar["length"]:
        raise ShapeMismatchError(
            f"blob holds {values.size} values, sidecar announces {sidecar['length']}"
        )
    layout = tuple((name, tuple(shape)) for name, shape in sidecar["layout"])
    return ParamVector(values, layout)


def params_digest(params: ParamVector) -> str:
    """SHA-256 of the little-endian blob."""
    return hashlib.sha256(params.values.astype(BLOB_DTYPE).tobytes()).hexdigest()
