"""
Three-way verdicts, cross-examined by dumb oracles
==================================================

verify() wires compilation, interval bounds and dual ascent together and
answers one of:

    robust     a positive certified lower bound on the margin
    falsified  a concrete in-box point that flips the decision
               (always re-checked through the kernel, never the network)
    unknown    neither proof within budget

On a 2-feature toy we can afford ground truth by brute force, so this
script sweeps the radius and prints both the verdict and the grid
oracle's minimum side by side.  The verifier is sound by construction;
what the sweep shows is where it is also *sharp*.
"""

import numpy as np

from svmcert import (
    KernelSpec,
    OptimizerConfig,
    Region,
    SvmModel,
    VerificationInstance,
    classify,
    decision_value,
    verify,
)
from svmcert.verifier import brute_force_min, random_attack

rng = np.random.default_rng(11)

model = SvmModel(
    support_vectors=rng.uniform(-1, 1, (4, 2)),
    coef=rng.uniform(-2, 2, 4),
    bias=-0.15,
    kernel=KernelSpec("rbf", gamma=1.2),
)
x = np.array([0.35, 0.2])
target = classify(model, x)
print(f"center margin: {target * decision_value(model, x):+.4f}  (class {target:+d})\n")

config = OptimizerConfig(lr_init=0.02, lr_final=1e-5, max_iters=400)
print(f"{'delta':>6}  {'verdict':<10} {'lower':>9} {'upper':>9} {'iters':>5}   grid min")
for delta in (0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.45):
    instance = VerificationInstance.for_model(model, x, delta)
    v = verify(model, instance, config)
    truth, _ = brute_force_min(model, target, Region(x, delta), 200)
    print(f"{delta:>6}  {v.status:<10} {v.certified_lower:>+9.4f} {v.best_upper:>+9.4f} "
          f"{v.iterations:>5}   {truth:+.4f}")

# A falsified verdict carries its evidence: a point inside the box whose
# kernel-side margin is non-positive.
big = VerificationInstance.for_model(model, x, 0.45)
v = verify(model, big, config)
if v.status == "falsified":
    print(f"\nwitness at delta=0.45: {np.array2string(v.witness, precision=3)}  "
          f"margin {v.witness_value:+.6f}")
    print(f"inside the box: {Region(x, 0.45).contains(v.witness)}")

# The random attacker is the same idea without any cleverness: corners,
# coordinate flips, then uniform draws.  Useful as an independent check.
hit = random_attack(model, target, Region(x, 0.45), samples=20000, seed=0)
print(f"random attack found a flip: {hit is not None}")
