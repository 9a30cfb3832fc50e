"""
Interval bounds over a perturbation box
=======================================

A robustness query fixes a sample x and a radius delta; the adversary
may pick any point of the box [x - delta, x + delta].  Before any
optimization, plain interval arithmetic pushes that box through the
compiled layers: sign-split matrix bounds for affine maps, monotone
endpoint mapping for activations (with the even-power straddle case
snapping the lower end to zero).

The resulting per-layer boxes are loose but *sound*: no point of the
input box can escape them.  The script checks that empirically, and
shows how the final readout interval relates to the true decision range.
"""

import numpy as np

from svmcert import (
    KernelSpec,
    Region,
    SvmModel,
    compile_network,
    decision_values,
    forward,
    propagate_bounds,
)

rng = np.random.default_rng(21)

model = SvmModel(
    support_vectors=rng.uniform(-1, 1, (3, 2)),
    coef=np.array([1.5, -1.0, 0.7]),
    bias=-0.2,
    kernel=KernelSpec("rbf", gamma=0.8),
)
net = compile_network(model)

x = np.array([0.4, -0.1])
for delta in (0.0, 0.05, 0.2, 0.5):
    region = Region(center=x, radius=delta)
    lb = propagate_bounds(net, region)

    # Monte-Carlo: every sampled trajectory must stay inside every box.
    lo, hi = region.box()
    pts = rng.uniform(lo, hi, (2000, 2))
    escaped = 0
    for p in pts:
        states = forward(net, p)
        for layer in range(net.depth):
            if (np.any(states.z[layer] < lb.z_lo[layer]) or
                    np.any(states.z[layer] > lb.z_hi[layer])):
                escaped += 1
    out_lo, out_hi = lb.z_lo[-1][0], lb.z_hi[-1][0]
    seen = decision_values(model, pts)
    print(f"delta={delta:<5} readout interval [{out_lo:+.4f}, {out_hi:+.4f}]  "
          f"sampled range [{seen.min():+.4f}, {seen.max():+.4f}]  escapes: {escaped}")

# At delta=0 the box is a point and the interval collapses to the exact
# value; as delta grows the interval widens much faster than the true
# range -- that slack is what the dual ascent will claw back.
