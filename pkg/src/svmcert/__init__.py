"""Certification of local adversarial robustness for kernel SVM classifiers.

The pipeline: load or build an SVM (`SvmModel`), compile it into a small
layered network (`compile_network`), box the perturbation region and
propagate interval bounds (`Region`, `propagate_bounds`), then maximize the
Lagrangian dual lower bound on the worst-case margin (`maximize_dual`).
`verify` packages all of that into a per-sample robust / falsified / unknown
verdict, and the `svmcert` command line sweeps datasets and radii.
"""

from .bounds import LayerBounds, Region, propagate_bounds
from .dual import DualVars, InnerSolution, box_linear_min, dual_value, one_dim_min, subgradients
from .model import (
    KernelSpec,
    ModelError,
    SvmModel,
    classify,
    decision_value,
    decision_values,
    kernel_eval,
    kernel_matrix,
    load_model,
    save_model,
)
from .network import (
    Activation,
    BlockSumMap,
    DenseMap,
    LayeredNetwork,
    NetworkStates,
    ReadoutMap,
    StackedIdentityMap,
    compile_network,
    forward,
)
from .optimizer import AdamState, DualResult, OptimizerConfig, adam_step, lr_schedule, maximize_dual
from .verifier import VerificationInstance, Verdict, brute_force_min, random_attack, verify

__all__ = [
    "Activation",
    "AdamState",
    "BlockSumMap",
    "DenseMap",
    "DualResult",
    "DualVars",
    "InnerSolution",
    "KernelSpec",
    "LayerBounds",
    "LayeredNetwork",
    "ModelError",
    "NetworkStates",
    "OptimizerConfig",
    "ReadoutMap",
    "Region",
    "StackedIdentityMap",
    "SvmModel",
    "Verdict",
    "VerificationInstance",
    "adam_step",
    "box_linear_min",
    "brute_force_min",
    "classify",
    "compile_network",
    "decision_value",
    "decision_values",
    "dual_value",
    "forward",
    "kernel_eval",
    "kernel_matrix",
    "load_model",
    "lr_schedule",
    "maximize_dual",
    "one_dim_min",
    "propagate_bounds",
    "random_attack",
    "save_model",
    "subgradients",
    "verify",
]

__version__ = "0.1.0"
