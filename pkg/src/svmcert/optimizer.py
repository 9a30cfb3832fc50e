"""Subgradient ascent on the dual bound with Adam moment estimation.

The dual is concave and nonsmooth, so the constraint residuals at the inner
argmins serve as ascent directions.  Steps use Adam (first/second moment
estimates with bias correction) and a step size that decays linearly from
``lr_init`` to ``lr_final`` over the iteration budget.

Each iterate yields two numbers: the dual value (a sound lower bound on the
margin) and the margin of the inner x_0 argmin, a concrete point in the region
(an upper bound).  The loop keeps the best of each and stops as soon as either
settles the verdict:

  * current dual value > 0        -> the region is certified robust;
  * any upper bound <= 0          -> that point is an adversarial witness;
  * |dual - upper| < theta        -> the gap is closed to tolerance;
  * all residuals exactly zero    -> the bound is tight, nothing left to move;
  * iteration budget exhausted.

``early_stop=False`` disables the first three exits to let the ascent run to
the budget, which is how convergence quality is measured in tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bounds import LayerBounds, Region
from .dual import DualVars, dual_value, subgradients
from .network import LayeredNetwork, forward


@dataclass(frozen=True)
class OptimizerConfig:
    """Ascent hyperparameters; defaults are desk-scale (budget in the thousands)."""

    lr_init: float = 1e-3
    lr_final: float = 1e-7
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    theta: float = 1e-3  # verdict gap tolerance
    max_iters: int = 2000
    early_stop: bool = True

    def __post_init__(self):
        # lr 0 is allowed as an explicit "frozen duals" degenerate case
        if not (math.isfinite(self.lr_init) and self.lr_init >= 0):
            raise ValueError(f"lr_init must be >= 0, got {self.lr_init}")
        if not (math.isfinite(self.lr_final) and 0 <= self.lr_final <= self.lr_init):
            raise ValueError(f"lr_final must satisfy 0 <= lr_final <= lr_init, got {self.lr_final}")
        for name in ("beta1", "beta2"):
            b = getattr(self, name)
            if not (0 <= b < 1):
                raise ValueError(f"{name} must lie in [0, 1), got {b}")
        if not self.eps > 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")
        if not self.theta > 0:
            raise ValueError(f"theta must be > 0, got {self.theta}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")


@dataclass
class AdamState:
    """First/second moment accumulators, shaped like the dual variables."""

    m_affine: list
    v_affine: list
    m_act: list
    v_act: list
    step: int = 0

    @classmethod
    def zeros(cls, net: LayeredNetwork) -> "AdamState":
        shape = lambda: [np.zeros(net.widths[l + 1]) for l in range(net.depth)]
        return cls(m_affine=shape(), v_affine=shape(), m_act=shape(), v_act=shape())


@dataclass(frozen=True)
class DualResult:
    """Outcome of one ascent run.

    best_lower is the largest dual value seen (the certificate when > 0);
    best_upper the smallest margin of any inner candidate, achieved at
    ``witness`` (a concrete region point, so best_upper <= 0 is constructive
    non-robustness).  ``reason`` is one of positive-bound, falsified,
    gap-closed, zero-subgradient, budget-exhausted.
    """

    best_lower: float
    best_upper: float
    iterations: int
    reason: str
    witness: np.ndarray


def lr_schedule(config: OptimizerConfig, k: int) -> float:
    """Linear decay from lr_init (k=0) to lr_final (k=max_iters-1)."""
    if not 0 <= k < config.max_iters:
        raise ValueError(f"lr_schedule: k={k} outside [0, {config.max_iters})")
    if config.max_iters == 1:
        return config.lr_init
    if k == config.max_iters - 1:
        return config.lr_final  # land on the endpoint exactly
    return config.lr_init + (config.lr_final - config.lr_init) * k / (config.max_iters - 1)


def adam_step(duals: DualVars, state: AdamState, grads, lr: float, config: OptimizerConfig):
    """One ascent step in place; returns the updated (duals, state)."""
    g_affine, g_act = grads
    t = state.step + 1
    corr1 = 1.0 - config.beta1**t
    corr2 = 1.0 - config.beta2**t
    groups = (
        (duals.affine, state.m_affine, state.v_affine, g_affine),
        (duals.act, state.m_act, state.v_act, g_act),
    )
    for params, ms, vs, gs in groups:
        for p, m, v, g in zip(params, ms, vs, gs):
            m *= config.beta1
            m += (1.0 - config.beta1) * g
            v *= config.beta2
            v += (1.0 - config.beta2) * g * g
            p += lr * (m / corr1) / (np.sqrt(v / corr2) + config.eps)
    state.step = t
    return duals, state


def maximize_dual(
    net: LayeredNetwork,
    target: int,
    region: Region,
    bounds: LayerBounds,
    config: OptimizerConfig,
) -> DualResult:
    """Run the ascent from zero multipliers and report the best bounds seen."""
    duals = DualVars.zeros(net)
    state = AdamState.zeros(net)
    best_lower = -math.inf
    best_upper = math.inf
    witness = region.center
    frozen = config.lr_init == 0.0 and config.lr_final == 0.0

    iterations = 0
    reason = "budget-exhausted"
    for k in range(config.max_iters):
        sol = dual_value(net, target, bounds, region, duals)
        upper = target * forward(net, sol.candidate).value
        iterations = k + 1
        if sol.total > best_lower:
            best_lower = sol.total
        if upper < best_upper:
            best_upper = upper
            witness = sol.candidate
        if config.early_stop:
            if best_upper <= 0.0:
                reason = "falsified"
                break
            if sol.total > 0.0:
                reason = "positive-bound"
                break
            if abs(sol.total - upper) < config.theta:
                reason = "gap-closed"
                break
        g_affine, g_act = subgradients(net, sol, duals)
        if all(not g.any() for g in g_affine) and all(not g.any() for g in g_act):
            reason = "zero-subgradient"
            break
        if frozen:
            break  # zero step size: every later iterate would repeat this one
        adam_step(duals, state, (g_affine, g_act), lr_schedule(config, k), config)
    return DualResult(
        best_lower=best_lower,
        best_upper=best_upper,
        iterations=iterations,
        reason=reason,
        witness=witness,
    )
