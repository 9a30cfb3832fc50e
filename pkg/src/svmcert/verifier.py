"""Per-sample robustness verification and independent ground-truth oracles.

verify() wires the whole pipeline together for one (sample, radius) query:
compile the model to its layered form, propagate interval bounds over the
perturbation box, and run the dual ascent.  The outcome is a three-way
verdict:

  * robust     -- the dual lower bound is positive, so no point of the box
                  flips the decision;
  * falsified  -- some box point has non-positive margin; the point is
                  re-checked through the kernel decision function (never the
                  compiled network) before it is reported;
  * unknown    -- neither proof was obtained within budget.

brute_force_min and random_attack are deliberately dumb, self-contained
checks used to cross-examine the clever path in tests.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bounds import Region, propagate_bounds
from .model import SvmModel, classify, decision_value, decision_values
from .network import compile_network
from .optimizer import OptimizerConfig, maximize_dual

_EVAL_CHUNK = 1 << 16


@dataclass(frozen=True)
class VerificationInstance:
    """One robustness query: a sample, a radius, and the label to defend.

    ``target`` is the resolved +-1 label whose sign the decision function
    must keep over the whole box.  In "predicted" mode it is the model's own
    prediction at the center (robustness = decision invariance); in "given"
    mode it is a caller-supplied ground-truth label.
    """

    x: np.ndarray
    delta: float
    target: int
    label_mode: str = "predicted"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64)
        if x.ndim != 1:
            raise ValueError(f"instance x must be 1-D, got shape {x.shape}")
        if not np.isfinite(x).all():
            raise ValueError("instance x contains non-finite entries")
        object.__setattr__(self, "x", x)
        self.x.flags.writeable = False
        if not (np.isfinite(self.delta) and self.delta >= 0):
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.target not in (-1, 1):
            raise ValueError(f"target label must be +1 or -1, got {self.target}")
        if self.label_mode not in ("predicted", "given"):
            raise ValueError(f"label_mode must be 'predicted' or 'given', got {self.label_mode!r}")

    @classmethod
    def for_model(
        cls,
        model: SvmModel,
        x: np.ndarray,
        delta: float,
        label_mode: str = "predicted",
        label: Optional[int] = None,
    ) -> "VerificationInstance":
        """Resolve the target label against a model and build the instance."""
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (model.n_features,):
            raise ValueError(f"instance width {x.shape} does not match model n_features {model.n_features}")
        if label_mode == "predicted":
            if label is not None:
                raise ValueError("label must be omitted in predicted mode")
            target = classify(model, x)
        elif label_mode == "given":
            if label not in (-1, 1):
                raise ValueError(f"given mode requires label +1 or -1, got {label}")
            target = label
        else:
            raise ValueError(f"label_mode must be 'predicted' or 'given', got {label_mode!r}")
        return cls(x=x, delta=float(delta), target=target, label_mode=label_mode)


@dataclass(frozen=True)
class Verdict:
    """Outcome of verify(): status plus the evidence supporting it.

    status "robust" carries certified_lower > 0; "falsified" carries a
    witness with kernel-side margin witness_value <= 0; "unknown" carries
    both inconclusive bounds.
    """

    status: str
    certified_lower: float
    best_upper: float
    iterations: int
    reason: str
    wall_ms: float
    witness: Optional[np.ndarray] = None
    witness_value: Optional[float] = None

    def __post_init__(self):
        if self.status == "robust":
            if not self.certified_lower > 0:
                raise ValueError("robust verdict requires certified_lower > 0")
        elif self.status == "falsified":
            if self.witness is None or self.witness_value is None or self.witness_value > 0:
                raise ValueError("falsified verdict requires a witness with value <= 0")
        elif self.status != "unknown":
            raise ValueError(f"unknown verdict status {self.status!r}")


def verify(model: SvmModel, instance: VerificationInstance, config: OptimizerConfig = OptimizerConfig()) -> Verdict:
    """Decide robustness of one sample inside its radius-delta box.

    A kernel-validated witness takes priority over the lower bound: the two
    can only conflict if the compiled network and the kernel disagree beyond
    tolerance, and a concrete counterexample is the stronger evidence.
    """
    if instance.x.shape != (model.n_features,):
        raise ValueError(
            f"instance width {instance.x.shape[0]} does not match model n_features {model.n_features}"
        )
    if instance.label_mode == "predicted" and instance.target != classify(model, instance.x):
        raise ValueError("predicted-mode instance target disagrees with the model's prediction")

    start = time.perf_counter()
    net = compile_network(model)
    region = Region(center=instance.x, radius=instance.delta)
    bounds = propagate_bounds(net, region)
    result = maximize_dual(net, instance.target, region, bounds, config)
    wall_ms = (time.perf_counter() - start) * 1e3

    if result.best_upper <= 0.0:
        # re-check through the kernel itself so a compiler bug cannot forge this
        value = instance.target * decision_value(model, result.witness)
        if value <= 0.0:
            return Verdict(
                status="falsified",
                certified_lower=result.best_lower,
                best_upper=result.best_upper,
                iterations=result.iterations,
                reason=result.reason,
                wall_ms=wall_ms,
                witness=result.witness,
                witness_value=float(value),
            )
    if result.best_lower > 0.0:
        return Verdict(
            status="robust",
            certified_lower=result.best_lower,
            best_upper=result.best_upper,
            iterations=result.iterations,
            reason=result.reason,
            wall_ms=wall_ms,
        )
    return Verdict(
        status="unknown",
        certified_lower=result.best_lower,
        best_upper=result.best_upper,
        iterations=result.iterations,
        reason=result.reason,
        wall_ms=wall_ms,
    )


def brute_force_min(model: SvmModel, target: int, region: Region, points_per_dim: int):
    """Grid-search min of target*f over the region; the testing ground truth.

    ``points_per_dim`` counts subdivisions per axis: each axis contributes
    the points lo + (hi-lo)*i/points_per_dim for i = 0..points_per_dim, plus
    the region center.  Axis sets at resolution p are subsets of those at 2p,
    so doubling the resolution can only lower (never raise) the reported min.
    """
    n = region.center.shape[0]
    if n > 4:
        raise ValueError(f"brute_force_min guards n <= 4 (cost grows as points^n), got n={n}")
    if points_per_dim < 1:
        raise ValueError(f"points_per_dim must be >= 1, got {points_per_dim}")
    if target not in (-1, 1):
        raise ValueError(f"target label must be +1 or -1, got {target}")
    lo, hi = region.box()
    steps = np.arange(points_per_dim + 1) / points_per_dim
    axes = [
        np.unique(np.concatenate([lo[j] + (hi[j] - lo[j]) * steps, [region.center[j]]]))
        for j in range(n)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    pts = np.stack([m.ravel() for m in mesh], axis=1)
    best_val = np.inf
    best_arg = pts[0]
    for begin in range(0, pts.shape[0], _EVAL_CHUNK):
        chunk = pts[begin : begin + _EVAL_CHUNK]
        vals = target * decision_values(model, chunk)
        k = int(np.argmin(vals))
        if vals[k] < best_val:
            best_val = float(vals[k])
            best_arg = chunk[k].copy()
    return best_val, best_arg


def random_attack(
    model: SvmModel, target: int, region: Region, samples: int, seed: int
) -> Optional[np.ndarray]:
    """Search the region for a point with non-positive margin.

    Tries a fixed candidate slate first -- the two diagonal corners and the
    2n single-coordinate flips of each (linear pieces bottom out at corners)
    -- then ``samples`` seeded uniform draws.  Returns the first hit or None.
    """
    if samples < 1:
        raise ValueError(f"samples must be >= 1, got {samples}")
    if target not in (-1, 1):
        raise ValueError(f"target label must be +1 or -1, got {target}")
    lo, hi = region.box()
    n = lo.shape[0]

    slate = [lo, hi]
    for j in range(n):
        flip_hi = hi.copy()
        flip_hi[j] = lo[j]
        slate.append(flip_hi)
        flip_lo = lo.copy()
        flip_lo[j] = hi[j]
        slate.append(flip_lo)
    slate = np.array(slate)
    vals = target * decision_values(model, slate)
    hits = np.flatnonzero(vals <= 0.0)
    if hits.size:
        return slate[hits[0]].copy()

    rng = np.random.default_rng(seed)
    remaining = samples
    while remaining > 0:
        batch = min(remaining, _EVAL_CHUNK)
        draws = rng.uniform(lo, hi, size=(batch, n))
        vals = target * decision_values(model, draws)
        hits = np.flatnonzero(vals <= 0.0)
        if hits.size:
            return draws[hits[0]].copy()
        remaining -= batch
    return None
