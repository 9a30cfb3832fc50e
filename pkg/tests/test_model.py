"""Kernels, decision function, and model file round-trips."""

import json
import math

import numpy as np
import pytest

from svmcert import (
    KernelSpec,
    ModelError,
    SvmModel,
    classify,
    decision_value,
    decision_values,
    kernel_eval,
    load_model,
    save_model,
)
from conftest import KERNEL_KINDS, random_model


def test_kernel_formulas_match_direct_evaluation(rng):
    u = rng.uniform(-1, 1, 6)
    v = rng.uniform(-1, 1, 6)
    dot = float(u @ v)
    assert kernel_eval(KernelSpec("linear"), u, v) == pytest.approx(dot, abs=1e-15)
    k = KernelSpec("poly", degree=3, coef0=0.5, gamma=0.7)
    assert kernel_eval(k, u, v) == pytest.approx((0.7 * dot + 0.5) ** 3, rel=1e-14)
    k = KernelSpec("sigmoid", gamma=0.9, coef0=-0.25)
    assert kernel_eval(k, u, v) == pytest.approx(math.tanh(0.9 * dot - 0.25), rel=1e-14)
    k = KernelSpec("rbf", gamma=1.3)
    assert kernel_eval(k, u, v) == pytest.approx(math.exp(-1.3 * float(((u - v) ** 2).sum())), rel=1e-14)


def test_kernel_symmetry_and_rbf_diagonal(rng):
    for kind in KERNEL_KINDS:
        model = random_model(rng, kind)
        u = rng.uniform(-1, 1, model.n_features)
        v = rng.uniform(-1, 1, model.n_features)
        assert kernel_eval(model.kernel, u, v) == pytest.approx(
            kernel_eval(model.kernel, v, u), rel=1e-13, abs=1e-13
        )
    assert kernel_eval(KernelSpec("rbf", gamma=0.4), u, u) == 1.0


def test_decision_value_matches_handwritten_sum(rng):
    # independent oracle: extended-precision accumulation, one kernel at a time
    for kind in KERNEL_KINDS:
        for _ in range(20):
            model = random_model(rng, kind)
            x = rng.uniform(-1, 1, model.n_features)
            acc = math.fsum(
                float(model.coef[i]) * kernel_eval(model.kernel, x, model.support_vectors[i])
                for i in range(model.n_support)
            ) + model.bias
            assert decision_value(model, x) == pytest.approx(acc, rel=1e-12, abs=1e-12)


def test_decision_values_batch_agrees_with_single(rng):
    for kind in KERNEL_KINDS:
        model = random_model(rng, kind)
        xs = rng.uniform(-1, 1, (50, model.n_features))
        batch = decision_values(model, xs)
        single = np.array([decision_value(model, x) for x in xs])
        np.testing.assert_allclose(batch, single, rtol=1e-12, atol=1e-12)


def test_classify_sign_convention():
    # f(x) = x_0 exactly, so the zero tie is reachable
    model = SvmModel(np.array([[1.0]]), np.array([1.0]), 0.0, KernelSpec("linear"))
    assert classify(model, np.array([0.5])) == 1
    assert classify(model, np.array([-0.5])) == -1
    assert classify(model, np.array([0.0])) == 1  # sign(0) is +1 by definition


@pytest.mark.parametrize("kind", KERNEL_KINDS)
def test_model_json_round_trip(tmp_path, rng, kind):
    model = random_model(rng, kind)
    path = tmp_path / "model.json"
    save_model(model, path)
    back = load_model(path)
    np.testing.assert_array_equal(back.support_vectors, model.support_vectors)
    np.testing.assert_array_equal(back.coef, model.coef)
    assert back.bias == model.bias
    assert back.kernel == model.kernel
    assert back.n_features == model.n_features
    # repr-based float serialization makes the round trip exact
    x = rng.uniform(-1, 1, model.n_features)
    assert decision_value(back, x) == decision_value(model, x)


def _write(tmp_path, payload):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(payload))
    return path


def _good_payload():
    return {
        "format_version": 1,
        "kernel": {"type": "rbf", "gamma": 0.5},
        "n_features": 2,
        "support_vectors": [[0.0, 1.0], [1.0, 0.0]],
        "dual_coef": [1.0, -1.0],
        "bias": 0.25,
    }


def test_load_model_accepts_minimal_valid_file(tmp_path):
    model = load_model(_write(tmp_path, _good_payload()))
    assert model.n_support == 2
    assert model.kernel.kind == "rbf"


@pytest.mark.parametrize(
    "mutate, needle",
    [
        (lambda p: p.pop("format_version"), "format_version"),
        (lambda p: p.update(format_version=2), "format_version"),
        (lambda p: p.pop("kernel"), "kernel"),
        (lambda p: p["kernel"].update(type="cubic"), "kernel.type"),
        (lambda p: p["kernel"].pop("gamma"), "kernel.gamma"),
        (lambda p: p["kernel"].update(gamma=-1.0), "kernel.gamma"),
        (lambda p: p.update(n_features=0), "n_features"),
        (lambda p: p.update(n_features="two"), "n_features"),
        (lambda p: p.update(support_vectors=[[0.0], [1.0]]), "support_vectors"),
        (lambda p: p.update(dual_coef=[1.0]), "dual_coef"),
        (lambda p: p.update(dual_coef=[1.0, float("nan")]), "dual_coef"),
        (lambda p: p.update(bias="big"), "bias"),
    ],
)
def test_load_model_names_offending_field(tmp_path, mutate, needle):
    payload = _good_payload()
    mutate(payload)
    with pytest.raises(ModelError, match=needle.replace(".", r"\.")):
        load_model(_write(tmp_path, payload))


def test_load_model_rejects_non_json(tmp_path):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    with pytest.raises(ModelError, match="JSON"):
        load_model(path)


def test_kernel_constraints_enforced():
    with pytest.raises(ModelError):
        KernelSpec("sigmoid", gamma=-0.5, coef0=-1.0)  # slope must be positive
    with pytest.raises(ModelError):
        KernelSpec("sigmoid", gamma=0.5, coef0=0.1)  # offset must be negative
    with pytest.raises(ModelError):
        KernelSpec("rbf", gamma=0.0)
    with pytest.raises(ModelError):
        KernelSpec("rbf")  # gamma is required
    with pytest.raises(ModelError):
        KernelSpec("poly", degree=0)
    with pytest.raises(ModelError):
        KernelSpec("linear", gamma=1.0)  # linear takes no parameters
    # poly defaults: coef0 -> 0, gamma -> 1
    k = KernelSpec("poly", degree=2)
    assert (k.coef0, k.gamma) == (0.0, 1.0)


def test_model_validation():
    sv = np.array([[1.0, 2.0]])
    with pytest.raises(ModelError):
        SvmModel(sv, np.array([1.0, 2.0]), 0.0, KernelSpec("linear"))  # coef length
    with pytest.raises(ModelError):
        SvmModel(sv, np.array([np.inf]), 0.0, KernelSpec("linear"))
    with pytest.raises(ModelError):
        SvmModel(sv, np.array([1.0]), np.nan, KernelSpec("linear"))
    model = SvmModel(sv, np.array([1.0]), 0.0, KernelSpec("linear"))
    assert model.n_features == 2  # inferred from the support vectors
    with pytest.raises(ValueError):
        model.support_vectors[0, 0] = 9.0  # arrays are frozen


def test_decision_rejects_wrong_width():
    model = SvmModel(np.array([[1.0, 2.0]]), np.array([1.0]), 0.0, KernelSpec("linear"))
    with pytest.raises(ValueError, match="width"):
        decision_value(model, np.array([1.0, 2.0, 3.0]))
