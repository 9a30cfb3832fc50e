"""Writers for the verifier's on-disk formats (model JSON, IDX samples).

The formats are the contract between the two tools, so they are written
here directly rather than by importing the verifier package.
"""

import json
import struct

import numpy as np

MODEL_FORMAT_VERSION = 1
IDX_IMAGE_MAGIC = 0x00000803
IDX_LABEL_MAGIC = 0x00000801


def write_model(path, kernel: dict, support_vectors, dual_coef, bias: float) -> None:
    sv = np.asarray(support_vectors, dtype=float)
    coef = np.asarray(dual_coef, dtype=float)
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "kernel": kernel,
        "n_features": int(sv.shape[1]),
        "support_vectors": sv.tolist(),
        "dual_coef": coef.tolist(),
        "bias": float(bias),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def write_idx_images(path, images) -> None:
    images = np.ascontiguousarray(images, dtype=np.uint8)
    count, rows, cols = images.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", IDX_IMAGE_MAGIC, count, rows, cols))
        fh.write(images.tobytes())


def write_idx_labels(path, labels) -> None:
    labels = np.ascontiguousarray(labels, dtype=np.uint8)
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", IDX_LABEL_MAGIC, labels.shape[0]))
        fh.write(labels.tobytes())


def read_idx_images(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic, count, rows, cols = struct.unpack(">IIII", fh.read(16))
        if magic != IDX_IMAGE_MAGIC:
            raise ValueError(f"{path}: not an IDX image file (magic {magic:#x})")
        data = fh.read(count * rows * cols)
    return np.frombuffer(data, dtype=np.uint8).reshape(count, rows, cols)


def read_idx_labels(path) -> np.ndarray:
    with open(path, "rb") as fh:
        magic, count = struct.unpack(">II", fh.read(8))
        if magic != IDX_LABEL_MAGIC:
            raise ValueError(f"{path}: not an IDX label file (magic {magic:#x})")
        data = fh.read(count)
    return np.frombuffer(data, dtype=np.uint8)
