"""Reading and writing the IDX format used by MNIST-style datasets.

Only the two layouts the benchmarks use are supported: unsigned-byte image
tensors (magic 0x00000803, dims count x rows x cols) and unsigned-byte label
vectors (magic 0x00000801).  All header integers are big-endian.
"""

from __future__ import annotations

import struct

import numpy as np

IMAGE_MAGIC = 0x00000803
LABEL_MAGIC = 0x00000801


class IdxError(ValueError):
    """Raised when a file does not parse as the expected IDX layout."""


def _read_exact(fh, count: int, what: str) -> bytes:
    data = fh.read(count)
    if len(data) != count:
        raise IdxError(f"truncated IDX file: expected {count} bytes for {what}, got {len(data)}")
    return data


def read_idx_images(path) -> np.ndarray:
    """Parse an IDX image file into a (count, rows, cols) uint8 array."""
    with open(path, "rb") as fh:
        magic, count, rows, cols = struct.unpack(">IIII", _read_exact(fh, 16, "image header"))
        if magic != IMAGE_MAGIC:
            raise IdxError(f"bad IDX image magic {magic:#010x}, expected {IMAGE_MAGIC:#010x}")
        body = _read_exact(fh, count * rows * cols, "image pixels")
        if fh.read(1):
            raise IdxError("trailing bytes after IDX image data")
    return np.frombuffer(body, dtype=np.uint8).reshape(count, rows, cols)


def read_idx_labels(path) -> np.ndarray:
    """Parse an IDX label file into a (count,) uint8 array."""
    with open(path, "rb") as fh:
        magic, count = struct.unpack(">II", _read_exact(fh, 8, "label header"))
        if magic != LABEL_MAGIC:
            raise IdxError(f"bad IDX label magic {magic:#010x}, expected {LABEL_MAGIC:#010x}")
        body = _read_exact(fh, count, "labels")
        if fh.read(1):
            raise IdxError("trailing bytes after IDX label data")
    return np.frombuffer(body, dtype=np.uint8)


def write_idx_images(path, images: np.ndarray) -> None:
    """Write a (count, rows, cols) uint8 array as an IDX image file."""
    images = np.ascontiguousarray(images, dtype=np.uint8)
    if images.ndim != 3:
        raise IdxError(f"images must be (count, rows, cols), got shape {images.shape}")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", IMAGE_MAGIC, *images.shape))
        fh.write(images.tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    """Write a (count,) uint8 array as an IDX label file."""
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    if labels.ndim != 1:
        raise IdxError(f"labels must be 1-D, got shape {labels.shape}")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", LABEL_MAGIC, labels.shape[0]))
        fh.write(labels.tobytes())
