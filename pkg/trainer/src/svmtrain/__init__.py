"""Training companion for the SVM robustness verifier.

Trains the benchmark binary classifiers (MNIST and Fashion-MNIST class
pairs with linear, polynomial and RBF kernels), exports them in the
verifier's model/sample formats, and generates the synthetic fixture
used by the verifier's own test suite.
"""

from .datasets import DatasetUnavailable, binary_subset, dataset_dir, load_split
from .experiments import (
    BENCHMARKS,
    EVAL_COUNT,
    KERNEL_TAGS,
    REFERENCE_ACCURACY,
    ExperimentSpec,
    check_round_trip,
    export_samples,
    train,
    train_export,
)
from .fixture import build_fixture

__all__ = [
    "BENCHMARKS",
    "DatasetUnavailable",
    "EVAL_COUNT",
    "ExperimentSpec",
    "KERNEL_TAGS",
    "REFERENCE_ACCURACY",
    "binary_subset",
    "build_fixture",
    "check_round_trip",
    "dataset_dir",
    "export_samples",
    "load_split",
    "train",
    "train_export",
]

__version__ = "0.1.0"
