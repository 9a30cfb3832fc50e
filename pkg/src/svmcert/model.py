"""Trained kernel SVM binary classifiers: kernels, decision function, model file I/O.

A model is the usual support-vector expansion

    f(x) = sum_i coef_i * kappa(x, sv_i) + bias,      label = sign(f(x)),

with ``coef_i`` the signed dual coefficients (alpha_i * y_i) and ``kappa`` one of
four kernels: linear, polynomial, sigmoid, RBF.  Parameter names follow the
model-file schema (``degree``, ``coef0``, ``gamma``), which matches what common
SVM trainers export:

    linear    kappa(u, v) = u.v
    poly      kappa(u, v) = (gamma * u.v + coef0) ** degree
    sigmoid   kappa(u, v) = tanh(gamma * u.v + coef0),  gamma > 0, coef0 < 0
    rbf       kappa(u, v) = exp(-gamma * ||u - v||**2), gamma > 0

Models are immutable after loading and safe to share across threads.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

KERNEL_KINDS = ("linear", "poly", "sigmoid", "rbf")

FORMAT_VERSION = 1


class ModelError(ValueError):
    """Raised when a model file is malformed or violates a kernel constraint."""


@dataclass(frozen=True)
class KernelSpec:
    """Kernel variant plus its parameters; unused parameters stay at None."""

    kind: str
    degree: int | None = None
    coef0: float | None = None
    gamma: float | None = None

    def __post_init__(self):
        if self.kind not in KERNEL_KINDS:
            raise ModelError(f"kernel.type: unknown kernel {self.kind!r}")
        if self.kind == "poly":
            if self.degree is None or int(self.degree) != self.degree or self.degree < 1:
                raise ModelError("kernel.degree: polynomial degree must be an integer >= 1")
            object.__setattr__(self, "degree", int(self.degree))
            object.__setattr__(self, "coef0", _finite("kernel.coef0", 0.0 if self.coef0 is None else self.coef0))
            object.__setattr__(self, "gamma", _finite("kernel.gamma", 1.0 if self.gamma is None else self.gamma))
        elif self.kind == "sigmoid":
            gamma = _finite("kernel.gamma", 1.0 if self.gamma is None else self.gamma)
            if gamma <= 0:
                raise ModelError("kernel.gamma: sigmoid slope must be > 0")
            if self.coef0 is None or not self.coef0 < 0:
                raise ModelError("kernel.coef0: sigmoid offset must be < 0")
            object.__setattr__(self, "gamma", gamma)
            object.__setattr__(self, "coef0", _finite("kernel.coef0", self.coef0))
        elif self.kind == "rbf":
            gamma = _finite("kernel.gamma", self.gamma if self.gamma is not None else math.nan)
            if not gamma > 0:
                raise ModelError("kernel.gamma: rbf gamma must be > 0")
            object.__setattr__(self, "gamma", gamma)
            if self.degree is not None or self.coef0 is not None:
                raise ModelError("kernel: rbf takes only gamma")
        else:  # linear
            if self.degree is not None or self.coef0 is not None or self.gamma is not None:
                raise ModelError("kernel: linear kernel takes no parameters")


@dataclass(frozen=True)
class SvmModel:
    """A trained binary SVM: m support vectors of width n, signed coefficients, bias."""

    support_vectors: np.ndarray  # (m, n)
    coef: np.ndarray  # (m,), alpha_i * y_i
    bias: float
    kernel: KernelSpec
    n_features: int = 0  # 0 = infer from support_vectors

    def __post_init__(self):
        sv = np.asarray(self.support_vectors, dtype=float)
        coef = np.asarray(self.coef, dtype=float)
        if sv.ndim != 2 or sv.shape[0] < 1 or sv.shape[1] < 1:
            raise ModelError("support_vectors: need an m x n matrix with m, n >= 1")
        if self.n_features == 0:
            object.__setattr__(self, "n_features", sv.shape[1])
        if self.n_features < 1 or sv.shape[1] != self.n_features:
            raise ModelError(
                f"support_vectors: row width {sv.shape[1]} != n_features {self.n_features}"
            )
        if coef.shape != (sv.shape[0],):
            raise ModelError(
                f"dual_coef: length {coef.shape[0] if coef.ndim == 1 else coef.shape} != m = {sv.shape[0]}"
            )
        if not np.isfinite(sv).all():
            raise ModelError("support_vectors: entries must be finite")
        if not np.isfinite(coef).all():
            raise ModelError("dual_coef: entries must be finite")
        _finite("bias", self.bias)
        sv.flags.writeable = False
        coef.flags.writeable = False
        object.__setattr__(self, "support_vectors", sv)
        object.__setattr__(self, "coef", coef)
        object.__setattr__(self, "bias", float(self.bias))

    @property
    def n_support(self) -> int:
        return self.support_vectors.shape[0]


def _finite(field: str, value) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ModelError(f"{field}: expected a number, got {value!r}") from None
    if not math.isfinite(value):
        raise ModelError(f"{field}: must be finite, got {value}")
    return value


def kernel_eval(kernel: KernelSpec, u: np.ndarray, v: np.ndarray) -> float:
    """Evaluate kappa(u, v) for two feature vectors of equal width."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    if u.shape != v.shape:
        raise ValueError(f"kernel_eval: shapes differ, {u.shape} vs {v.shape}")
    return float(_kernel_rows(kernel, u[None, :], v)[0])


def _kernel_rows(kernel: KernelSpec, rows: np.ndarray, x: np.ndarray) -> np.ndarray:
    """kappa(x, rows_i) for every row of ``rows``; the vectorized inner loop."""
    if kernel.kind == "linear":
        return rows @ x
    if kernel.kind == "poly":
        return (kernel.gamma * (rows @ x) + kernel.coef0) ** kernel.degree
    if kernel.kind == "sigmoid":
        return np.tanh(kernel.gamma * (rows @ x) + kernel.coef0)
    diff = rows - x
    return np.exp(-kernel.gamma * np.einsum("ij,ij->i", diff, diff))


def decision_value(model: SvmModel, x: np.ndarray) -> float:
    """f(x) = coef . kappa(x, sv) + bias."""
    x = _check_width(model, x)
    return float(model.coef @ _kernel_rows(model.kernel, model.support_vectors, x) + model.bias)


def decision_values(model: SvmModel, xs: np.ndarray) -> np.ndarray:
    """Decision values for a batch of inputs, one per row of ``xs``."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 2 or xs.shape[1] != model.n_features:
        raise ValueError(f"decision_values: expected (batch, {model.n_features}) input, got {xs.shape}")
    k = kernel_matrix(model.kernel, model.support_vectors, xs)
    return model.coef @ k + model.bias


def kernel_matrix(kernel: KernelSpec, rows: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Gram block kappa(xs_j, rows_i), shape (len(rows), len(xs))."""
    if kernel.kind == "linear":
        return rows @ xs.T
    if kernel.kind == "poly":
        return (kernel.gamma * (rows @ xs.T) + kernel.coef0) ** kernel.degree
    if kernel.kind == "sigmoid":
        return np.tanh(kernel.gamma * (rows @ xs.T) + kernel.coef0)
    sq = (
        np.sum(rows * rows, axis=1)[:, None]
        - 2.0 * (rows @ xs.T)
        + np.sum(xs * xs, axis=1)[None, :]
    )
    return np.exp(-kernel.gamma * np.maximum(sq, 0.0))


def classify(model: SvmModel, x: np.ndarray) -> int:
    """+1 if f(x) >= 0 else -1.  sign(0) is defined as +1 so the classifier is total."""
    return 1 if decision_value(model, x) >= 0.0 else -1


def _check_width(model: SvmModel, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape != (model.n_features,):
        raise ValueError(f"input: expected width {model.n_features}, got shape {x.shape}")
    return x


def load_model(path) -> SvmModel:
    """Load and validate a model JSON file; every failure names the offending field."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelError(f"model file: invalid JSON ({exc})") from exc
    if not isinstance(raw, dict):
        raise ModelError("model file: top level must be a JSON object")
    version = raw.get("format_version")
    if version != FORMAT_VERSION:
        raise ModelError(f"format_version: expected {FORMAT_VERSION}, got {version!r}")
    for field in ("kernel", "n_features", "support_vectors", "dual_coef", "bias"):
        if field not in raw:
            raise ModelError(f"{field}: missing")
    kraw = raw["kernel"]
    if not isinstance(kraw, dict) or "type" not in kraw:
        raise ModelError("kernel.type: missing")
    kernel = KernelSpec(
        kind=kraw["type"],
        degree=kraw.get("degree"),
        coef0=kraw.get("coef0"),
        gamma=kraw.get("gamma"),
    )
    n_features = raw["n_features"]
    if not isinstance(n_features, int) or n_features < 1:
        raise ModelError(f"n_features: expected a positive integer, got {n_features!r}")
    try:
        sv = np.asarray(raw["support_vectors"], dtype=float)
    except (TypeError, ValueError):
        raise ModelError("support_vectors: expected an array of number arrays") from None
    if sv.ndim != 2:
        raise ModelError("support_vectors: rows must all have the same width")
    try:
        coef = np.asarray(raw["dual_coef"], dtype=float)
    except (TypeError, ValueError):
        raise ModelError("dual_coef: expected an array of numbers") from None
    return SvmModel(
        support_vectors=sv,
        coef=coef,
        bias=_finite("bias", raw["bias"]),
        kernel=kernel,
        n_features=n_features,
    )


def save_model(model: SvmModel, path) -> None:
    """Write a model as format_version-1 JSON (floats keep full double precision)."""
    kernel: dict = {"type": model.kernel.kind}
    if model.kernel.kind == "poly":
        kernel.update(degree=model.kernel.degree, coef0=model.kernel.coef0, gamma=model.kernel.gamma)
    elif model.kernel.kind == "sigmoid":
        kernel.update(coef0=model.kernel.coef0, gamma=model.kernel.gamma)
    elif model.kernel.kind == "rbf":
        kernel.update(gamma=model.kernel.gamma)
    doc = {
        "format_version": FORMAT_VERSION,
        "kernel": kernel,
        "n_features": model.n_features,
        "support_vectors": model.support_vectors.tolist(),
        "dual_coef": model.coef.tolist(),
        "bias": model.bias,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")
