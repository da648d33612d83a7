"""Reader and writer for the IDX binary format (MNIST-style files).

Layout (big-endian):

    images: u32 magic 0x00000803 | u32 count | u32 rows | u32 cols | u8 pixels...
    labels: u32 magic 0x00000801 | u32 count | u8 labels...

Files ending in ``.gz`` are transparently (de)compressed.
"""

import gzip
import struct
from pathlib import Path
from typing import Union

import numpy as np
import numpy.typing as npt

from ..errors import IdxFormatError, IdxMismatchError
from .dataset import Dataset

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


def _read_bytes(path: Union[str, Path]) -> bytes:
    path_obj = Path(path)
    if path_obj.suffix == ".gz":
        with gzip.open(path_obj, "rb") as f:
            return f.read()
    with open(path_obj, "rb") as f:
        return f.read()


def _write_bytes(path: Union[str, Path], data: bytes) -> None:
    path_obj = Path(path)
    path_obj.parent.mkdir(parents=True, exist_ok=True)
    if path_obj.suffix == ".gz":
        with gzip.open(path_obj, "wb") as f:
            f.write(data)
    else:
        with open(path_obj, "wb") as f:
            f.write(data)


def _parse_images(raw: bytes, path: Union[str, Path]) -> npt.NDArray[np.uint8]:
    if len(raw) < 16:
        raise IdxFormatError(f"{path}: truncated image header ({len(raw)} bytes)")
    magic, count, rows, cols = struct.unpack(">IIII", raw[:16])
    if magic != IMAGE_MAGIC:
        raise IdxFormatError(f"{path}: bad image magic 0x{magic:08x}, expected 0x{IMAGE_MAGIC:08x}")
    expected = count * rows * cols
    body = raw[16:]
    if len(body) != expected:
        raise IdxFormatError(
            f"{path}: image body has {len(body)} bytes, header announces {expected}"
        )
    return np.frombuffer(body, dtype=np.uint8).reshape(count, rows * cols)


def _parse_labels(raw: bytes, path: Union[str, Path]) -> npt.NDArray[np.uint8]:
    if len(raw) < 8:
        raise IdxFormatError(f"{path}: truncated label header ({len(raw)} bytes)")
    magic, count = struct.unpack(">II", raw[:8])
    if magic != LABEL_MAGIC:
        raise IdxFormatError(f"{path}: bad label magic 0x{magic:08x}, expected 0x{LABEL_MAGIC:08x}")
    body = raw[8:]
    if len(body) != count:
        raise IdxFormatError(f"{path}: label body has {len(body)} bytes, header announces {count}")
    return np.frombuffer(body, dtype=np.uint8)


def load_idx(images_path: Union[str, Path], labels_path: Union[str, Path]) -> Dataset:
    """Load an IDX image/label pair into a Dataset.

    Pixels are scaled by 1/255 into [0, 1]; each image is flattened row-wise.

    Args:
        images_path: Path of the image file (magic 2051).
        labels_path: Path of the label file (magic 2049).

    Returns:
        Dataset with ``num_classes = max(label) + 1`` (at least 2).

    Raises:
        IdxFormatError: On bad magic numbers or truncated files.
        IdxMismatchError: When the image and label counts differ.
    """
    images = _parse_images(_read_bytes(images_path), images_path)
    labels = _parse_labels(_read_bytes(labels_path), labels_path)
    if images.shape[0] != labels.shape[0]:
        raise IdxMismatchError(
            f"{images.shape[0]} images in {images_path} but {labels.shape[0]} labels "
            f"in {labels_path}"
        )
    if images.shape[0] == 0:
        raise IdxFormatError(f"{images_path}: file holds no images")
    features = images.astype(np.float64) / 255.0
    num_classes = max(int(labels.max()) + 1, 2)
    return Dataset(features, labels.astype(np.int64), num_classes, name=Path(images_path).stem)


def write_idx(
    images_path: Union[str, Path],
    labels_path: Union[str, Path],
    images: npt.ArrayLike,
    labels: npt.ArrayLike,
) -> None:
    """Write uint8 images (count x rows x cols) and labels as an IDX pair."""
    img = np.asarray(images, dtype=np.uint8)
    lab = np.asarray(labels, dtype=np.uint8)
    if img.ndim != 3:
        raise IdxFormatError(f"images must be count x rows x cols, got shape {img.shape}")
    count, rows, cols = img.shape
    _write_bytes(images_path, struct.pack(">IIII", IMAGE_MAGIC, count, rows, cols) + img.tobytes())
    _write_bytes(labels_path, struct.pack(">II", LABEL_MAGIC, lab.shape[0]) + lab.tobytes())
