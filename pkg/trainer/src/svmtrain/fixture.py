"""Generate the self-contained verification fixture.

A synthetic two-class image problem stands in for a small digit pair:
it trains in seconds, needs no downloads, and yields an RBF model with
few enough support vectors (<= 200) that a four-delta robustness curve
over 100 samples finishes in minutes.  Class 0 is a bright blob in the
upper-left of the 28x28 frame, class 1 in the lower-right; pixel noise
and blob jitter control how entangled the classes are.
"""

import json
import os

import numpy as np
import sklearn
from sklearn.svm import SVC

from . import formats

SIDE = 28
DEFAULT_SEED = 20260823
MAX_SUPPORT = 200


def _bump(row, col, amplitude, sigma):
    rows = np.arange(SIDE, dtype=np.float64)[:, None]
    cols = np.arange(SIDE, dtype=np.float64)[None, :]
    sq = (rows - row) ** 2 + (cols - col) ** 2
    return amplitude * np.exp(-sq / (2.0 * sigma**2))


def synthesize(rng, count, center, jitter, noise, amplitude=(90.0, 200.0), sigma=4.0):
    """`count` noisy uint8 images of a blob jittered around `center`.

    Amplitude is drawn per image from the given range; faint blobs sit
    closer to the decision boundary, spreading the margins out so the
    certified fraction degrades gradually as the ball radius grows.
    """
    images = np.empty((count, SIDE, SIDE), dtype=np.uint8)
    for i in range(count):
        dr, dc = rng.integers(-jitter, jitter + 1, size=2)
        amp = rng.uniform(*amplitude)
        img = _bump(center[0] + dr, center[1] + dc, amp, sigma)
        img += rng.normal(0.0, noise, size=(SIDE, SIDE))
        images[i] = np.clip(np.rint(img), 0, 255)
    return images


def build_fixture(out_dir, seed: int = DEFAULT_SEED, train_per_class: int = 400,
                  test_total: int = 100, C: float = 5.0, jitter: int = 3,
                  noise: float = 45.0) -> dict:
    """Train the fixture model and write model.json + images.idx + labels.idx.

    Returns the metadata dict (also written to metadata.json).
    """
    rng = np.random.default_rng(seed)
    centers = {0: (9.0, 9.0), 1: (18.0, 18.0)}

    train_images = np.concatenate([
        synthesize(rng, train_per_class, centers[0], jitter, noise),
        synthesize(rng, train_per_class, centers[1], jitter, noise),
    ])
    pixels = train_images.reshape(len(train_images), -1).astype(np.float64) / 255.0
    y = np.concatenate([np.ones(train_per_class), -np.ones(train_per_class)])

    gamma = 1.0 / (pixels.shape[1] * pixels.var())
    svc = SVC(kernel="rbf", C=C, gamma=gamma)
    svc.fit(pixels, y)
    n_support = int(svc.support_vectors_.shape[0])
    if n_support > MAX_SUPPORT:
        raise RuntimeError(
            f"fixture model has {n_support} support vectors (cap {MAX_SUPPORT}); "
            f"lower the noise/jitter or raise C"
        )

    half = test_total // 2
    test_images = np.concatenate([
        synthesize(rng, half, centers[0], jitter, noise),
        synthesize(rng, test_total - half, centers[1], jitter, noise),
    ])
    test_labels = np.concatenate([
        np.zeros(half, dtype=np.uint8),
        np.ones(test_total - half, dtype=np.uint8),
    ])
    order = rng.permutation(test_total)
    test_images, test_labels = test_images[order], test_labels[order]

    test_pixels = test_images.reshape(test_total, -1).astype(np.float64) / 255.0
    signed = np.where(test_labels == 0, 1, -1)
    pred = np.where(svc.decision_function(test_pixels) >= 0.0, 1, -1)
    accuracy = 100.0 * float(np.mean(pred == signed))

    os.makedirs(out_dir, exist_ok=True)
    formats.write_model(
        os.path.join(out_dir, "model.json"),
        kernel={"type": "rbf", "gamma": gamma},
        support_vectors=svc.support_vectors_,
        dual_coef=svc.dual_coef_[0],
        bias=float(svc.intercept_[0]),
    )
    formats.write_idx_images(os.path.join(out_dir, "images.idx"), test_images)
    formats.write_idx_labels(os.path.join(out_dir, "labels.idx"), test_labels)

    report = {
        "generator": "svmtrain.fixture",
        "seed": seed,
        "train_per_class": train_per_class,
        "test_total": test_total,
        "C": C,
        "jitter": jitter,
        "noise": noise,
        "gamma": gamma,
        "n_support": n_support,
        "test_accuracy_percent": accuracy,
        "classes": {"0": "upper-left blob (+1)", "1": "lower-right blob (-1)"},
        "sklearn_version": sklearn.__version__,
    }
    with open(os.path.join(out_dir, "metadata.json"), "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2)
        fh.write("\n")
    return report
