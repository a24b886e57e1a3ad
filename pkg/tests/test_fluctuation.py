"""Layered maps, Jacobians (analytic vs finite differences), local reports."""

import math

import numpy as np
import pytest

from specbound.fluctuation import (
    Layer,
    VectorMap,
    eval_map,
    eval_map_batch,
    fluctuation_certificate,
    jacobian_analytic,
    jacobian_fd,
)
from specbound.rng import SeededRng


def _tanh_net(gen, dims=(6, 5, 3)):
    layers = []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        layers.append(Layer(
            weight=gen.standard_normal((d_out, d_in)),
            bias=gen.standard_normal(d_out),
            activation="tanh",
        ))
    return VectorMap(tuple(layers))


def test_layer_and_map_validation():
    w = np.ones((2, 3))
    with pytest.raises(ValueError):
        Layer(weight=w, bias=np.ones(3))  # bias length must match rows
    with pytest.raises(ValueError):
        Layer(weight=w, bias=np.ones(2), activation="sigmoid")
    with pytest.raises(ValueError):
        VectorMap((Layer(weight=w, bias=np.ones(2)),
                   Layer(weight=np.ones((2, 4)), bias=np.ones(2))))
    vm = VectorMap((Layer(weight=w, bias=np.ones(2)),))
    assert vm.in_dim == 3 and vm.out_dim == 2


def test_eval_map_identity_and_tanh():
    w = np.array([[1.0, 2.0], [0.0, -1.0]])
    b = np.array([0.5, 0.0])
    x = np.array([1.0, 3.0])
    lin = VectorMap((Layer(weight=w, bias=b),))
    assert np.allclose(eval_map(lin, x), w @ x + b)
    tanh = VectorMap((Layer(weight=w, bias=b, activation="tanh"),))
    assert np.allclose(eval_map(tanh, x), np.tanh(w @ x + b))


def test_eval_map_batch_matches_single():
    gen = np.random.default_rng(61)
    vm = _tanh_net(gen)
    xs = gen.standard_normal((10, vm.in_dim))
    batch = eval_map_batch(vm, xs)
    assert batch.shape == (10, vm.out_dim)
    for i in range(10):
        assert np.allclose(batch[i], eval_map(vm, xs[i]), atol=1e-14)


def test_jacobian_analytic_vs_fd_on_tanh_net():
    gen = np.random.default_rng(62)
    for _ in range(5):
        vm = _tanh_net(gen)
        x = gen.standard_normal(vm.in_dim)
        ja = jacobian_analytic(vm, x)
        jf = jacobian_fd(vm, x)
        assert np.abs(ja - jf).max() <= 5e-7


def test_jacobian_fd_plain_callable():
    def f(x):
        return np.array([x[0] ** 2 + x[1], math.sin(x[1])])

    x = np.array([3.0, 0.5])
    expected = np.array([[6.0, 1.0], [0.0, math.cos(0.5)]])
    assert np.abs(jacobian_fd(f, x) - expected).max() <= 1e-7


def test_jacobian_relu_between_kinks():
    w = np.array([[2.0, 0.0], [0.0, -3.0]])
    vm = VectorMap((Layer(weight=w, bias=np.zeros(2), activation="relu"),))
    x = np.array([1.0, 1.0])  # pre-activations (2, -3): rows on/off
    ja = jacobian_analytic(vm, x)
    assert np.allclose(ja, [[2.0, 0.0], [0.0, 0.0]])


def test_certificate_nudges_off_relu_kink():
    # First pre-activation exactly at the kink, second solidly active, so
    # the map stays nonzero whichever side the nudge lands on.
    w = np.eye(2)
    x = np.array([0.4, -0.7])
    vm = VectorMap((Layer(weight=w, bias=np.array([-0.4, 0.9]),
                          activation="relu"),
                    Layer(weight=np.ones((1, 2)), bias=np.zeros(1))))
    report = fluctuation_certificate(vm, x, 2.0, 2.0, 0.1, 400, SeededRng(3))
    assert math.isfinite(report.ratio)
    assert report.delta_max > 0.0


def test_certificate_rejects_locally_zero_map():
    # Both relu units dead in a neighborhood: the linearization vanishes and
    # a worst-to-average ratio is meaningless.
    vm = VectorMap((Layer(weight=np.eye(2), bias=np.array([-1.0, -1.0]),
                          activation="relu"),
                    Layer(weight=np.ones((1, 2)), bias=np.zeros(1))))
    with pytest.raises(ValueError, match="locally zero"):
        fluctuation_certificate(vm, np.zeros(2), 2.0, 2.0, 0.1, 100,
                                SeededRng(4))


def test_certificate_euclidean_invariants():
    gen = np.random.default_rng(63)
    vm = _tanh_net(gen, dims=(8, 6, 4))
    x = gen.standard_normal(8)
    report = fluctuation_certificate(vm, x, 2.0, 2.0, 0.05, 20000, SeededRng(4))
    assert report.method == "exact"
    # Worst case dominates the average case at p = q.
    assert report.ratio >= 1.0 - 1e-12
    assert report.ratio >= report.corrected_bound - 4.0 * report.ratio_stderr
    assert report.corrected_bound >= report.rank_bound - 1e-12
    assert report.rank_bound >= report.dimension_bound - 1e-12


def test_certificate_scales_linearly_in_eps():
    gen = np.random.default_rng(64)
    vm = _tanh_net(gen)
    x = gen.standard_normal(vm.in_dim)
    r1 = fluctuation_certificate(vm, x, 2.0, 2.0, 1.0, 500, SeededRng(5))
    r2 = fluctuation_certificate(vm, x, 2.0, 2.0, 2.0, 500, SeededRng(5))
    assert r2.delta_max == pytest.approx(2.0 * r1.delta_max, rel=1e-12)
    assert r2.delta_avg == pytest.approx(2.0 * r1.delta_avg, rel=1e-12)
    assert r2.ratio == pytest.approx(r1.ratio, rel=1e-12)  # scale-free


def test_certificate_ball_average_below_sphere_average():
    gen = np.random.default_rng(65)
    vm = _tanh_net(gen)
    x = gen.standard_normal(vm.in_dim)
    sphere = fluctuation_certificate(vm, x, 2.0, 2.0, 1.0, 20000, SeededRng(6))
    ball = fluctuation_certificate(vm, x, 2.0, 2.0, 1.0, 20000, SeededRng(6),
                                   surface="ball")
    # Ball probes are sphere probes shrunk by a radius factor, so the mean
    # drops by about m/(m+1); with these n the separation dwarfs the noise.
    assert ball.delta_avg < sphere.delta_avg
    assert ball.delta_max == sphere.delta_max


def test_certificate_validation():
    vm = _tanh_net(np.random.default_rng(66))
    x = np.zeros(vm.in_dim)
    with pytest.raises(ValueError):
        fluctuation_certificate(vm, x, 2.0, 2.0, 0.0, 100, SeededRng(0))
    with pytest.raises(TypeError):
        fluctuation_certificate(vm, x, 2.0, 2.0, 1.0, 100, rng=None)
    # A locally zero map has no meaningful ratio.
    zero = VectorMap((Layer(weight=np.zeros((2, 2)), bias=np.zeros(2)),))
    with pytest.raises(ValueError):
        fluctuation_certificate(zero, np.zeros(2), 2.0, 2.0, 1.0, 100, SeededRng(0))
