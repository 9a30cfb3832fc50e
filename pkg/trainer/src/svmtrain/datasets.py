"""Locate (or fetch) the MNIST and Fashion-MNIST test/train IDX files."""

import gzip
import os
import urllib.error
import urllib.request

from . import formats

MIRRORS = {
    "mnist": [
        "https://storage.googleapis.com/cvdf-datasets/mnist/",
        "https://ossci-datasets.s3.amazonaws.com/mnist/",
    ],
    "fmnist": [
        "http://fashion-mnist.s3-website.eu-central-1.amazonaws.com/",
    ],
}

FILES = {
    "train_images": "train-images-idx3-ubyte",
    "train_labels": "train-labels-idx1-ubyte",
    "test_images": "t10k-images-idx3-ubyte",
    "test_labels": "t10k-labels-idx1-ubyte",
}


class DatasetUnavailable(RuntimeError):
    pass


def data_root() -> str:
    return os.environ.get("SVMTRAIN_DATA", os.path.join(os.getcwd(), "data"))


def _fetch(dataset: str, filename: str, dest: str) -> bool:
    for base in MIRRORS[dataset]:
        url = base + filename + ".gz"
        try:
            with urllib.request.urlopen(url, timeout=30) as resp:
                blob = gzip.decompress(resp.read())
        except (urllib.error.URLError, OSError):
            continue
        with open(dest, "wb") as fh:
            fh.write(blob)
        return True
    return False


def dataset_dir(dataset: str, root: str | None = None, download: bool = True) -> str:
    """Return the directory holding the four IDX files, downloading if allowed."""
    if dataset not in MIRRORS:
        raise ValueError(f"unknown dataset {dataset!r} (expected mnist or fmnist)")
    base = os.path.join(root or data_root(), dataset)
    os.makedirs(base, exist_ok=True)
    for filename in FILES.values():
        dest = os.path.join(base, filename)
        if os.path.exists(dest):
            continue
        if not (download and _fetch(dataset, filename, dest)):
            raise DatasetUnavailable(
                f"{dataset}: {filename} not found under {base} and could not be downloaded; "
                f"place the standard IDX files there to run this experiment"
            )
    return base


def load_split(dataset: str, split: str, root: str | None = None, download: bool = True):
    """(images uint8 (N,28,28), labels uint8 (N,)) for split 'train' or 'test'."""
    base = dataset_dir(dataset, root, download)
    images = formats.read_idx_images(os.path.join(base, FILES[f"{split}_images"]))
    labels = formats.read_idx_labels(os.path.join(base, FILES[f"{split}_labels"]))
    return images, labels


def binary_subset(images, labels, classes):
    """Samples of the two classes, in dataset order, with original byte labels."""
    a, b = classes
    keep = (labels == a) | (labels == b)
    return images[keep], labels[keep]
