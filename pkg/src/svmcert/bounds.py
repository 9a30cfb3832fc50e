"""Interval boxes enclosing every network state reachable from a perturbation region.

The region is an l-infinity ball around a center point, optionally clamped to a
valid feature range (off by default).  Boxes propagate layer by layer:

  * affine layers split the weights by sign, so
        z_lo = [W]+^T x_lo + [W]-^T x_hi + b   and symmetrically for z_hi;
    the structured rbf maps have no negative entries, so their negative part
    contributes nothing and the box image is just forward(lo), forward(hi);
  * monotone activations map interval endpoints through h (order flipped for
    decreasing h); the even-power activation is the one nonmonotone case, whose
    minimum over an interval straddling 0 is exactly 0.

Arithmetic is plain float64 with no directed rounding: downstream the dual
bound is the certificate, not the interval, and tests audit containment with a
1e-12 slack.  A degenerate box (lo identical to hi) short-circuits to a single
forward evaluation so that zero-radius regions reproduce forward states exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .network import Activation, LayeredNetwork, LinearMap


@dataclass(frozen=True)
class Region:
    """l-infinity ball: center, radius, optional per-feature clamp interval."""

    center: np.ndarray
    radius: float
    clamp: tuple | None = None  # (lo, hi) scalars or arrays, applied elementwise

    def __post_init__(self):
        center = np.asarray(self.center, dtype=float)
        if center.ndim != 1:
            raise ValueError(f"Region: center must be 1-D, got shape {center.shape}")
        if not (np.isfinite(self.radius) and self.radius >= 0):
            raise ValueError(f"Region: radius must be finite and >= 0, got {self.radius}")
        if self.clamp is not None:
            lo, hi = (np.broadcast_to(np.asarray(v, dtype=float), center.shape) for v in self.clamp)
            if np.any(lo > hi):
                raise ValueError("Region: clamp lower bound exceeds upper bound")
            object.__setattr__(self, "clamp", (lo, hi))
        center.flags.writeable = False
        object.__setattr__(self, "center", center)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def width(self) -> int:
        return self.center.size

    def box(self) -> tuple[np.ndarray, np.ndarray]:
        lo = self.center - self.radius
        hi = self.center + self.radius
        if self.clamp is not None:
            lo = np.maximum(lo, self.clamp[0])
            hi = np.minimum(hi, self.clamp[1])
        return lo, hi

    def contains(self, x: np.ndarray, slack: float = 0.0) -> bool:
        lo, hi = self.box()
        x = np.asarray(x, dtype=float)
        return bool(np.all(x >= lo - slack) and np.all(x <= hi + slack))


@dataclass(frozen=True)
class LayerBounds:
    """Boxes for every state: x_l for l = 0..L and z_l for l = 0..L."""

    x_lo: tuple
    x_hi: tuple
    z_lo: tuple
    z_hi: tuple


def interval_affine(lin: LinearMap, bias: np.ndarray, x_lo: np.ndarray, x_hi: np.ndarray):
    """Box image of x -> W^T x + b over [x_lo, x_hi]."""
    x_lo = np.asarray(x_lo, dtype=float)
    x_hi = np.asarray(x_hi, dtype=float)
    if np.any(x_lo > x_hi):
        raise ValueError("interval_affine: x_lo must be <= x_hi elementwise")
    if np.array_equal(x_lo, x_hi):
        z = lin.forward(x_lo) + bias  # exact collapse for point regions
        return z, z.copy()
    lo, hi = lin.interval_forward(x_lo, x_hi)
    return lo + bias, hi + bias


def activation_interval(act: Activation, z_lo, z_hi):
    """Elementwise image box of h over [z_lo, z_hi]; accepts scalars or arrays."""
    z_lo = np.asarray(z_lo, dtype=float)
    z_hi = np.asarray(z_hi, dtype=float)
    if np.any(z_lo > z_hi):
        raise ValueError("activation_interval: z_lo must be <= z_hi elementwise")
    a = act.apply(z_lo)
    b = act.apply(z_hi)
    mono = act.monotone
    if mono == "increasing":
        return a, b
    if mono == "decreasing":
        return b, a
    # even power: minimum is 0 on straddling intervals, else at the nearer endpoint
    lo = np.where((z_lo <= 0.0) & (z_hi >= 0.0), 0.0, np.minimum(a, b))
    return lo, np.maximum(a, b)


def propagate_bounds(net: LayeredNetwork, region: Region) -> LayerBounds:
    """Alternate interval_affine / activation_interval from the input box to the output."""
    if region.width != net.widths[0]:
        raise ValueError(f"propagate_bounds: region width {region.width} != input width {net.widths[0]}")
    x_lo, x_hi = region.box()
    xs_lo, xs_hi = [x_lo], [x_hi]
    zs_lo, zs_hi = [], []
    for l, (lin, bias) in enumerate(net.layers):
        z_lo, z_hi = interval_affine(lin, bias, xs_lo[-1], xs_hi[-1])
        zs_lo.append(z_lo)
        zs_hi.append(z_hi)
        if l < net.depth:
            a_lo, a_hi = activation_interval(net.activations[l], z_lo, z_hi)
            xs_lo.append(a_lo)
            xs_hi.append(a_hi)
    return LayerBounds(
        x_lo=tuple(xs_lo), x_hi=tuple(xs_hi), z_lo=tuple(zs_lo), z_hi=tuple(zs_hi)
    )
