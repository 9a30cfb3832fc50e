"""Interval propagation: containment, tightness where exact, degenerate boxes."""

import numpy as np
import pytest

from svmcert import Region, compile_network, forward, propagate_bounds
from svmcert.bounds import activation_interval, interval_affine
from svmcert.network import DenseMap, TANH, expneg, power
from conftest import KERNEL_KINDS, random_model

CONTAIN_SLACK = 1e-12


def test_region_box_and_contains():
    r = Region(center=np.array([0.5, -0.25]), radius=0.1)
    lo, hi = r.box()
    np.testing.assert_allclose(lo, [0.4, -0.35])
    np.testing.assert_allclose(hi, [0.6, -0.15])
    assert r.contains(np.array([0.45, -0.2]))
    assert not r.contains(np.array([0.45, 0.0]))
    assert r.contains(np.array([0.6 + 5e-13, -0.2]), slack=1e-12)


def test_region_clamp_applies_elementwise():
    r = Region(center=np.array([0.05, 0.95]), radius=0.2, clamp=(0.0, 1.0))
    lo, hi = r.box()
    np.testing.assert_allclose(lo, [0.0, 0.75])
    np.testing.assert_allclose(hi, [0.25, 1.0])


def test_region_validation():
    with pytest.raises(ValueError):
        Region(np.array([0.0]), -0.1)
    with pytest.raises(ValueError):
        Region(np.array([[0.0]]), 0.1)
    with pytest.raises(ValueError):
        Region(np.array([0.0]), 0.1, clamp=(1.0, 0.0))


def test_interval_affine_covers_box_vertices(rng):
    # exact oracle: an affine image of a box attains its bounds at vertices
    lin = DenseMap(rng.normal(size=(4, 3)))
    bias = rng.normal(size=3)
    mid = rng.normal(size=4)
    rad = rng.uniform(0, 0.5, 4)
    lo, hi = interval_affine(lin, bias, mid - rad, mid + rad)
    corners = np.array(
        [
            [mid[i] - rad[i] if s == 0 else mid[i] + rad[i] for i, s in enumerate(signs)]
            for signs in np.ndindex(2, 2, 2, 2)
        ]
    )
    vertex_vals = np.array([lin.forward(c) + bias for c in corners])
    np.testing.assert_allclose(vertex_vals.min(axis=0), lo, rtol=1e-12, atol=1e-12)
    np.testing.assert_allclose(vertex_vals.max(axis=0), hi, rtol=1e-12, atol=1e-12)


def test_interval_affine_degenerate_box_is_exact(rng):
    lin = DenseMap(rng.normal(size=(4, 3)))
    bias = rng.normal(size=3)
    x = rng.normal(size=4)
    lo, hi = interval_affine(lin, bias, x, x.copy())
    want = lin.forward(x) + bias
    np.testing.assert_array_equal(lo, want)
    np.testing.assert_array_equal(hi, want)


@pytest.mark.parametrize(
    "act",
    [TANH, power(1), power(2), power(3), power(4), expneg(0.8)],
    ids=lambda a: f"{a.kind}{a.degree or ''}",
)
def test_activation_interval_against_dense_grid(rng, act):
    for _ in range(200):
        a = rng.uniform(-2, 2)
        b = a + rng.uniform(0, 3)
        lo, hi = activation_interval(act, a, b)
        grid = act.apply(np.linspace(a, b, 3001))
        assert lo <= grid.min() + 1e-12
        assert hi >= grid.max() - 1e-12
        # the bounds are attained (at an endpoint or at 0), so they sit within
        # one Lipschitz grid-cell of the sampled extrema
        cell = 40.0 * (b - a) / 3000 + 1e-9
        assert lo >= grid.min() - cell
        assert hi <= grid.max() + cell


def test_even_power_straddling_interval_bottoms_at_zero():
    lo, hi = activation_interval(power(2), np.array([-1.0]), np.array([2.0]))
    assert lo[0] == 0.0
    assert hi[0] == 4.0
    lo, hi = activation_interval(power(2), np.array([1.0]), np.array([2.0]))
    assert (lo[0], hi[0]) == (1.0, 4.0)
    lo, hi = activation_interval(power(2), np.array([-2.0]), np.array([-1.0]))
    assert (lo[0], hi[0]) == (1.0, 4.0)


def test_interval_rejects_inverted_boxes():
    with pytest.raises(ValueError):
        activation_interval(TANH, np.array([1.0]), np.array([0.0]))
    with pytest.raises(ValueError):
        interval_affine(DenseMap(np.eye(2)), np.zeros(2), np.ones(2), np.zeros(2))


@pytest.mark.parametrize("kind", KERNEL_KINDS)
def test_propagated_bounds_contain_sampled_states(rng, kind):
    # Monte-Carlo containment: every state of every sampled point in its box
    for _ in range(8):
        model = random_model(rng, kind)
        net = compile_network(model)
        center = rng.uniform(-1, 1, model.n_features)
        region = Region(center, float(rng.uniform(0, 0.4)))
        lb = propagate_bounds(net, region)
        lo, hi = region.box()
        for _ in range(125):
            x0 = rng.uniform(lo, hi)
            states = forward(net, x0)
            for l in range(net.depth + 1):
                assert np.all(states.x[l] >= lb.x_lo[l] - CONTAIN_SLACK)
                assert np.all(states.x[l] <= lb.x_hi[l] + CONTAIN_SLACK)
                assert np.all(states.z[l] >= lb.z_lo[l] - CONTAIN_SLACK)
                assert np.all(states.z[l] <= lb.z_hi[l] + CONTAIN_SLACK)


@pytest.mark.parametrize("kind", KERNEL_KINDS)
def test_zero_radius_bounds_collapse_to_forward_states(rng, kind):
    model = random_model(rng, kind)
    net = compile_network(model)
    x = rng.uniform(-1, 1, model.n_features)
    lb = propagate_bounds(net, Region(x, 0.0))
    states = forward(net, x)
    for l in range(net.depth + 1):
        np.testing.assert_array_equal(lb.z_lo[l], states.z[l])
        np.testing.assert_array_equal(lb.z_hi[l], states.z[l])
        np.testing.assert_array_equal(lb.x_lo[l], states.x[l])
        np.testing.assert_array_equal(lb.x_hi[l], states.x[l])


def test_bounds_shrink_with_radius(rng):
    # nested regions give nested output intervals
    model = random_model(rng, "rbf")
    net = compile_network(model)
    center = rng.uniform(-1, 1, model.n_features)
    small = propagate_bounds(net, Region(center, 0.05))
    large = propagate_bounds(net, Region(center, 0.2))
    assert large.z_lo[-1][0] <= small.z_lo[-1][0]
    assert large.z_hi[-1][0] >= small.z_hi[-1][0]


def test_propagate_rejects_wrong_width(rng):
    model = random_model(rng, "linear", max_n=4)
    net = compile_network(model)
    with pytest.raises(ValueError):
        propagate_bounds(net, Region(np.zeros(model.n_features + 1), 0.1))
