"""Train the benchmark binary SVMs and export them in the verifier's formats.

Each experiment trains a scikit-learn SVC on one MNIST or Fashion-MNIST
class pair, reports accuracy on the first 100 binary test images, and
writes the model plus those samples to disk so the verifier can consume
them.  The first class of the pair is the +1 class, matching the
verifier's --classes A,B convention.
"""

import json
import os
from dataclasses import dataclass, replace

import numpy as np
import sklearn
from sklearn.svm import SVC

from . import datasets, formats

KERNEL_TAGS = ("linear", "poly2", "poly3", "rbf")

EVAL_COUNT = 100  # accuracy is reported on the first 100 binary test images

# Benchmark accuracy (percent, first 100 test images) that the training
# setup was calibrated to reproduce.  Keyed by (dataset, (pos, neg)).
REFERENCE_ACCURACY = {
    ("mnist", (0, 1)): {"linear": 100, "poly2": 100, "poly3": 100, "rbf": 100},
    ("mnist", (4, 9)): {"linear": 100, "poly2": 100, "poly3": 100, "rbf": 100},
    ("fmnist", (9, 8)): {"linear": 100, "poly2": 100, "poly3": 100, "rbf": 100},
    ("fmnist", (6, 4)): {"linear": 86, "poly2": 93, "poly3": 92, "rbf": 92},
}

CLASS_NAMES = {
    "mnist": {d: str(d) for d in range(10)},
    "fmnist": {
        0: "t-shirt", 1: "trouser", 2: "pullover", 3: "dress", 4: "coat",
        5: "sandal", 6: "shirt", 7: "sneaker", 8: "bag", 9: "ankle-boot",
    },
}


@dataclass(frozen=True)
class ExperimentSpec:
    """One training/export job: dataset, class pair, kernel, hyperparameters."""

    dataset: str                # "mnist" or "fmnist"
    classes: tuple              # (positive byte label, negative byte label)
    kernel: str                 # one of KERNEL_TAGS
    C: float = 1.0
    gamma: object = "scale"     # float, or "scale" (1 / (n_features * X.var()))
    coef0: float = 0.0
    out_dir: str = "exports"

    def __post_init__(self):
        if self.dataset not in ("mnist", "fmnist"):
            raise ValueError(f"dataset must be mnist or fmnist, got {self.dataset!r}")
        if len(self.classes) != 2 or self.classes[0] == self.classes[1]:
            raise ValueError(f"classes must be two distinct labels, got {self.classes}")
        if self.kernel not in KERNEL_TAGS:
            raise ValueError(f"kernel must be one of {KERNEL_TAGS}, got {self.kernel!r}")
        if self.C <= 0:
            raise ValueError(f"C must be > 0, got {self.C}")

    @property
    def name(self) -> str:
        a, b = self.classes
        return f"{self.dataset}-{a}v{b}-{self.kernel}"

    @property
    def export_dir(self) -> str:
        return os.path.join(self.out_dir, self.name)


BENCHMARKS = tuple(
    ExperimentSpec(dataset=dataset, classes=classes, kernel=kernel)
    for (dataset, classes) in REFERENCE_ACCURACY
    for kernel in KERNEL_TAGS
)


def resolved_gamma(spec: ExperimentSpec, pixels: np.ndarray) -> float:
    """Numeric gamma for the training set (sklearn's 'scale' rule, made explicit).

    The exported model needs a concrete number, so the data-dependent
    default is evaluated here rather than left symbolic.
    """
    if spec.kernel == "linear":
        return 0.0
    if isinstance(spec.gamma, str):
        if spec.gamma == "scale":
            return 1.0 / (pixels.shape[1] * pixels.var())
        raise ValueError(f"gamma must be a number or 'scale', got {spec.gamma!r}")
    gamma = float(spec.gamma)
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    return gamma


def _svc_params(spec: ExperimentSpec, gamma: float) -> dict:
    if spec.kernel == "linear":
        return {"kernel": "linear", "C": spec.C}
    if spec.kernel in ("poly2", "poly3"):
        return {
            "kernel": "poly",
            "degree": 2 if spec.kernel == "poly2" else 3,
            "gamma": gamma,
            "coef0": spec.coef0,
            "C": spec.C,
        }
    return {"kernel": "rbf", "gamma": gamma, "C": spec.C}


def kernel_config(spec: ExperimentSpec, gamma: float) -> dict:
    """Kernel block of the exported model JSON."""
    if spec.kernel == "linear":
        return {"type": "linear"}
    if spec.kernel in ("poly2", "poly3"):
        return {
            "type": "poly",
            "degree": 2 if spec.kernel == "poly2" else 3,
            "gamma": gamma,
            "coef0": spec.coef0,
        }
    return {"type": "rbf", "gamma": gamma}


def signed_labels(labels: np.ndarray, classes) -> np.ndarray:
    """Map the two byte labels onto +-1 (first class positive)."""
    pos, neg = classes
    out = np.where(labels == pos, 1, -1)
    unknown = (labels != pos) & (labels != neg)
    if unknown.any():
        raise ValueError(f"labels contain classes outside {classes}")
    return out


def train(spec: ExperimentSpec, root=None, download: bool = True):
    """Fit the SVC on the full binary training subset.

    Returns (fitted SVC, numeric gamma).  Labels are mapped to +-1 before
    fitting so the SVC's decision_function is positive exactly on the
    first class of the pair — the same orientation the verifier uses.
    """
    images, labels = datasets.load_split(spec.dataset, "train", root, download)
    images, labels = datasets.binary_subset(images, labels, spec.classes)
    pixels = images.reshape(len(images), -1).astype(np.float64) / 255.0
    y = signed_labels(labels, spec.classes)
    gamma = resolved_gamma(spec, pixels)
    svc = SVC(**_svc_params(spec, gamma))
    svc.fit(pixels, y)
    return svc, gamma


def first_test_samples(spec: ExperimentSpec, root=None, download: bool = True,
                       count: int = EVAL_COUNT):
    """First `count` test images/labels of the two classes, in dataset order."""
    images, labels = datasets.load_split(spec.dataset, "test", root, download)
    images, labels = datasets.binary_subset(images, labels, spec.classes)
    return images[:count], labels[:count]


def accuracy_percent(svc: SVC, pixels: np.ndarray, y: np.ndarray) -> float:
    """Accuracy of sign(decision_function), with sign(0) := +1."""
    pred = np.where(svc.decision_function(pixels) >= 0.0, 1, -1)
    return 100.0 * float(np.mean(pred == y))


def export_samples(spec: ExperimentSpec, root=None, download: bool = True,
                   count: int = EVAL_COUNT):
    """Write the first `count` binary test samples as an IDX image/label pair."""
    images, labels = first_test_samples(spec, root, download, count)
    os.makedirs(spec.export_dir, exist_ok=True)
    images_path = os.path.join(spec.export_dir, "images.idx")
    labels_path = os.path.join(spec.export_dir, "labels.idx")
    formats.write_idx_images(images_path, images)
    formats.write_idx_labels(labels_path, labels)
    return images_path, labels_path


def check_round_trip(model_path, pixels: np.ndarray, reference: np.ndarray) -> float:
    """Max |verifier decision value - trainer decision value| over the samples.

    Imports the verifier package lazily: the file formats are the contract,
    and this check confirms both sides agree on what they mean.
    """
    import svmcert

    model = svmcert.load_model(model_path)
    values = svmcert.decision_values(model, pixels)
    return float(np.max(np.abs(values - np.asarray(reference, dtype=np.float64))))


def train_export(spec: ExperimentSpec, root=None, download: bool = True) -> dict:
    """Train, evaluate on the first 100 test images, export, and cross-check.

    Returns the report dict that is also written to metadata.json.
    """
    svc, gamma = train(spec, root, download)

    images, labels = first_test_samples(spec, root, download)
    pixels = images.reshape(len(images), -1).astype(np.float64) / 255.0
    y = signed_labels(labels, spec.classes)
    accuracy = accuracy_percent(svc, pixels, y)

    os.makedirs(spec.export_dir, exist_ok=True)
    model_path = os.path.join(spec.export_dir, "model.json")
    formats.write_model(
        model_path,
        kernel=kernel_config(spec, gamma),
        support_vectors=svc.support_vectors_,
        dual_coef=svc.dual_coef_[0],
        bias=float(svc.intercept_[0]),
    )
    export_samples(spec, root, download)

    disagreement = check_round_trip(model_path, pixels, svc.decision_function(pixels))
    reference = REFERENCE_ACCURACY.get((spec.dataset, tuple(spec.classes)), {})

    report = {
        "experiment": spec.name,
        "dataset": spec.dataset,
        "classes": list(spec.classes),
        "class_names": [CLASS_NAMES[spec.dataset][c] for c in spec.classes],
        "kernel": kernel_config(spec, gamma),
        "C": spec.C,
        "n_support": int(svc.support_vectors_.shape[0]),
        "accuracy_first_100": accuracy,
        "reference_accuracy": reference.get(spec.kernel),
        "round_trip_max_abs_diff": disagreement,
        "sklearn_version": sklearn.__version__,
    }
    with open(os.path.join(spec.export_dir, "metadata.json"), "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return report


def run_benchmarks(out_dir: str = "exports", root=None, download: bool = True):
    """Train and export every benchmark pair/kernel; yields report dicts."""
    for spec in BENCHMARKS:
        yield train_export(replace(spec, out_dir=out_dir), root, download)
