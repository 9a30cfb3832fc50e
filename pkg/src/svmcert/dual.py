"""Lagrangian dual of the box-relaxed verification problem.

Relaxing the affine constraints (multipliers ``affine``, one vector per
pre-activation) and the activation constraints (multipliers ``act``) of the
layered network splits the inner minimization into independent pieces:

  * one box-linear program per layer input x_l over its interval box,
  * one box-linear program over the perturbation region itself (the x_0 piece),
  * a one-dimensional problem per pre-activation coordinate,
        min_{z in [lo, hi]}  mu * z - lam * h(z),
    solved exactly from the endpoints plus the real stationary points of the
    integrand that fall inside the interval.

The readout layer carries a multiplier pinned to -target, which folds the
objective target * f(x') into the same per-layer form, so the dual value is a
plain sum of closed-form pieces.  For any multipliers that sum is a sound lower
bound on target * f(x') over the whole region (weak duality); maximizing it is
the optimizer's job.

All tie rules are deterministic (box argmins take the lower corner on zero
coefficients; candidate order breaks one-dimensional ties), so re-evaluating
with identical inputs is bit-identical.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bounds import LayerBounds, Region
from .network import Activation, LayeredNetwork


@dataclass
class DualVars:
    """Multipliers per layer l = 0..depth-1.

    ``affine[l]`` weights the residual of z_l = W_l^T x_l + b_l and ``act[l]``
    the residual of x_{l+1} = h_l(z_l); both have the width of z_l.  The
    readout layer's multiplier is pinned to -target and is not stored.
    """

    affine: list
    act: list

    @classmethod
    def zeros(cls, net: LayeredNetwork) -> "DualVars":
        return cls(
            affine=[np.zeros(net.widths[l + 1]) for l in range(net.depth)],
            act=[np.zeros(net.widths[l + 1]) for l in range(net.depth)],
        )

    def copy(self) -> "DualVars":
        return DualVars(affine=[v.copy() for v in self.affine], act=[v.copy() for v in self.act])

    def check_shapes(self, net: LayeredNetwork) -> None:
        if len(self.affine) != net.depth or len(self.act) != net.depth:
            raise ValueError(
                f"DualVars: expected {net.depth} multiplier pairs, got"
                f" {len(self.affine)}/{len(self.act)}"
            )
        for l in range(net.depth):
            want = (net.widths[l + 1],)
            if self.affine[l].shape != want or self.act[l].shape != want:
                raise ValueError(f"DualVars: layer {l} multipliers must have shape {want}")


@dataclass(frozen=True)
class InnerSolution:
    """Inner argmins and subproblem values for one dual evaluation."""

    x_argmin: tuple  # argmin x_l, l = 0..depth
    z_argmin: tuple  # argmin z_l, l = 0..depth-1
    region_value: float  # x_0 piece, constant included
    layer_values: tuple  # x_l pieces for l = 1..depth, constants included
    act_values: tuple  # per-coordinate one-dimensional minima, one array per layer
    total: float

    @property
    def candidate(self) -> np.ndarray:
        """The x_0 argmin: a concrete point in the region, usable as an attack."""
        return self.x_argmin[0]


def box_linear_min(c: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """Exact min of c.x over the box [lo, hi]; ties (c_k == 0) take the lower corner."""
    c = np.asarray(c, dtype=float)
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if not (c.shape == lo.shape == hi.shape):
        raise ValueError(f"box_linear_min: shapes differ: {c.shape}, {lo.shape}, {hi.shape}")
    if np.any(lo > hi):
        raise ValueError("box_linear_min: lo must be <= hi elementwise")
    argmin = np.where(c > 0.0, lo, np.where(c < 0.0, hi, lo))
    return float(c @ argmin), argmin


def one_dim_min(act: Activation, mu: float, lam: float, z_lo: float, z_hi: float):
    """Exact min of g(z) = mu*z - lam*h(z) over [z_lo, z_hi]; returns (value, argmin)."""
    vals, args = one_dim_min_layer(
        act, np.array([float(mu)]), np.array([float(lam)]), np.array([float(z_lo)]), np.array([float(z_hi)])
    )
    return float(vals[0]), float(args[0])


def one_dim_min_layer(act: Activation, mu, lam, z_lo, z_hi):
    """Vectorized one_dim_min over a whole layer of independent coordinates.

    Candidates are the two endpoints plus any stationary points of g inside the
    interval; stationary-point formulas are skipped wherever their domain
    conditions fail (division by zero, log or root of an out-of-range value),
    which leaves the endpoints.  Invalid or out-of-interval candidates are
    clipped onto an endpoint, where they are harmless duplicates.
    """
    mu = np.asarray(mu, dtype=float)
    lam = np.asarray(lam, dtype=float)
    z_lo = np.asarray(z_lo, dtype=float)
    z_hi = np.asarray(z_hi, dtype=float)
    if not (mu.shape == lam.shape == z_lo.shape == z_hi.shape):
        raise ValueError("one_dim_min_layer: all inputs must share one shape")
    if np.any(z_lo > z_hi):
        raise ValueError("one_dim_min_layer: z_lo must be <= z_hi elementwise")

    cands = [z_lo, z_hi]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        if act.kind == "power" and act.degree > 1:
            d = act.degree
            t = mu / (lam * d)  # stationary: z**(d-1) = t
            if (d - 1) % 2 == 1:
                root = np.sign(t) * np.abs(t) ** (1.0 / (d - 1))
                cands.append(np.where(np.isfinite(root), root, z_lo))
            else:
                ok = np.isfinite(t) & (t >= 0.0)
                root = np.where(ok, t, 0.0) ** (1.0 / (d - 1))
                cands.append(np.where(ok, root, z_lo))
                cands.append(np.where(ok, -root, z_lo))
        elif act.kind == "tanh":
            a = 1.0 - mu / lam  # stationary: tanh(z)**2 = a
            ok = np.isfinite(a) & (a >= 0.0) & (a < 1.0)
            root = np.arctanh(np.sqrt(np.where(ok, a, 0.0)))
            cands.append(np.where(ok, root, z_lo))
            cands.append(np.where(ok, -root, z_lo))
        elif act.kind == "expneg":
            u = -mu / (lam * act.gamma)  # stationary: exp(-gamma*z) = u
            ok = np.isfinite(u) & (u > 0.0)
            root = -np.log(np.where(ok, u, 1.0)) / act.gamma
            cands.append(np.where(ok, root, z_lo))
        # identity and power(1) are linear in z: endpoints only

    grid = np.clip(np.stack(cands, axis=0), z_lo, z_hi)
    g = mu * grid - lam * act.apply(grid)
    pick = np.argmin(g, axis=0)  # first minimal candidate wins: deterministic ties
    take = (pick, np.arange(grid.shape[1]))
    return g[take], grid[take]


def dual_value(
    net: LayeredNetwork,
    target: int,
    bounds: LayerBounds,
    region: Region,
    duals: DualVars,
) -> InnerSolution:
    """Evaluate the dual lower bound at the given multipliers.

    ``target`` is the label (+1 or -1) whose decision margin is being bounded;
    ``bounds`` must come from ``propagate_bounds`` on the same net and region.
    """
    duals.check_shapes(net)
    depth = net.depth
    mu_top = np.array([-float(target)])
    mu = list(duals.affine) + [mu_top]

    x_argmin: list = [None] * (depth + 1)
    z_argmin: list = [None] * depth

    lin0, bias0 = net.layers[0]
    lo0, hi0 = region.box()
    f0, x_argmin[0] = box_linear_min(-lin0.adjoint(mu[0]), lo0, hi0)
    f0 -= float(bias0 @ mu[0])

    layer_values = []
    for l in range(1, depth + 1):
        lin, bias = net.layers[l]
        c = duals.act[l - 1] - lin.adjoint(mu[l])
        value, x_argmin[l] = box_linear_min(c, bounds.x_lo[l], bounds.x_hi[l])
        layer_values.append(value - float(bias @ mu[l]))

    act_values = []
    for l in range(depth):
        vals, z_argmin[l] = one_dim_min_layer(
            net.activations[l], mu[l], duals.act[l], bounds.z_lo[l], bounds.z_hi[l]
        )
        act_values.append(vals)

    total = f0 + sum(layer_values) + sum(float(v.sum()) for v in act_values)
    return InnerSolution(
        x_argmin=tuple(x_argmin),
        z_argmin=tuple(z_argmin),
        region_value=f0,
        layer_values=tuple(layer_values),
        act_values=tuple(act_values),
        total=total,
    )


def subgradients(net: LayeredNetwork, sol: InnerSolution, duals: DualVars):
    """Constraint residuals at the inner argmins: a supergradient of the dual.

    Returns (g_affine, g_act), aligned with DualVars.  Zero residuals mean the
    inner solution is primal-feasible, i.e. the bound is tight at this point.
    """
    duals.check_shapes(net)
    g_affine = []
    g_act = []
    for l in range(net.depth):
        lin, bias = net.layers[l]
        g_affine.append(sol.z_argmin[l] - (lin.forward(sol.x_argmin[l]) + bias))
        g_act.append(sol.x_argmin[l + 1] - net.activations[l].apply(sol.z_argmin[l]))
    return g_affine, g_act
