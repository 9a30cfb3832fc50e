"""
A trained SVM as data: support vectors, coefficients, kernels
=============================================================

The whole toolkit operates on one object: a binary SVM described by its
support vectors, signed dual coefficients, a bias, and a kernel.  This
script builds one by hand, evaluates every kernel family on it, and
round-trips it through the JSON model format.
"""

import tempfile

import numpy as np

from svmcert import (
    KernelSpec,
    SvmModel,
    classify,
    decision_value,
    kernel_eval,
    load_model,
    save_model,
)

# Two support vectors in the plane, one pulling positive, one negative.
sv = np.array([[1.0, 0.5], [-0.5, -1.0]])
coef = np.array([1.2, -0.8])
bias = 0.1

# The four kernel families and their parameter constraints:
#   linear   u.v
#   poly     (gamma u.v + coef0)^degree      gamma > 0, coef0 >= 0
#   sigmoid  tanh(gamma u.v + coef0)         gamma > 0, coef0 < 0
#   rbf      exp(-gamma ||u - v||^2)         gamma > 0
kernels = [
    KernelSpec("linear"),
    KernelSpec("poly", degree=3, gamma=0.8, coef0=1.0),
    KernelSpec("sigmoid", gamma=0.5, coef0=-0.2),
    KernelSpec("rbf", gamma=1.5),
]

x = np.array([0.3, -0.2])
for kernel in kernels:
    model = SvmModel(support_vectors=sv, coef=coef, bias=bias, kernel=kernel)
    # f(x) = sum_i coef_i * k(x, sv_i) + b, spelled out:
    by_hand = sum(coef[i] * kernel_eval(kernel, x, sv[i]) for i in range(len(coef))) + bias
    f = decision_value(model, x)
    label = classify(model, x)  # sign(f), with sign(0) := +1
    print(f"{kernel.kind:>8}: f(x) = {f:+.6f}  (by hand {by_hand:+.6f})  -> class {label:+d}")

# Models persist as plain JSON and survive the trip bit-for-bit.
model = SvmModel(support_vectors=sv, coef=coef, bias=bias, kernel=kernels[3])
with tempfile.NamedTemporaryFile(suffix=".json") as tmp:
    save_model(model, tmp.name)
    back = load_model(tmp.name)
print("\nround-trip exact:",
      np.array_equal(back.support_vectors, model.support_vectors)
      and np.array_equal(back.coef, model.coef)
      and back.bias == model.bias
      and back.kernel == model.kernel)
