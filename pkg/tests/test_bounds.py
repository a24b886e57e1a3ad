"""Closed-form robustness floors: deflation, tails, transport, noise design."""

import math

import numpy as np
import pytest

from specbound.bounds import (
    GaussianPair,
    MomentFunction,
    contraction_constant,
    dobrushin_bound,
    gaussian_err_bound,
    gaussian_tv,
    lighttail_bound,
    linf_deflation,
    moment_bound,
    noise_design,
    uap_bound,
    wasserstein_bound,
)
from specbound.numerics import Grid1D, std_normal_cdf

INF = math.inf


def test_moment_function_power_and_subgaussian():
    pw = MomentFunction.power(2.0)
    assert pw.value(3.0) == 9.0
    assert pw.inverse(9.0) == 3.0
    sg = MomentFunction.subgaussian(2.0)
    assert sg.value(2.0) == pytest.approx(math.e - 1.0, rel=1e-15)
    gen = np.random.default_rng(91)
    for r in gen.uniform(0.0, 10.0, size=50):
        assert sg.inverse(sg.value(r)) == pytest.approx(r, rel=1e-12, abs=1e-12)
        assert pw.inverse(pw.value(r)) == pytest.approx(r, rel=1e-12, abs=1e-12)


def test_moment_function_validation():
    with pytest.raises(ValueError):
        MomentFunction.power(0.5)
    with pytest.raises(ValueError):
        MomentFunction.subgaussian(0.0)
    with pytest.raises(ValueError):
        MomentFunction("cauchy", 1.0)
    pw = MomentFunction.power(2.0)
    with pytest.raises(ValueError):
        pw.value(-1.0)
    with pytest.raises(ValueError):
        pw.inverse(-1.0)


def test_gaussian_tv_shape():
    assert gaussian_tv(0.0) == 0.0
    assert gaussian_tv(6.0) > 0.99
    xs = np.linspace(0.0, 10.0, 50)
    vals = [gaussian_tv(x) for x in xs]
    assert all(0.0 <= v <= 1.0 for v in vals)
    assert all(b >= a for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        gaussian_tv(-0.1)


def test_linf_deflation_diagonal_reference():
    pair = GaussianPair(np.array([3.0, 1.0]), np.array([1.0, 1.0]))
    res = linf_deflation(pair, 1.0)
    assert np.allclose(res.s_vector, [2.0, 0.0])
    assert res.delta_eps == pytest.approx(2.0, abs=1e-15)
    assert np.allclose(res.z_opt, [1.0, 1.0])
    assert res.exact
    assert res.delta_eps_lower == res.delta_eps_upper == res.delta_eps


def test_linf_deflation_zero_eps_is_mahalanobis_norm():
    gen = np.random.default_rng(92)
    for _ in range(20):
        m = int(gen.integers(1, 8))
        delta = gen.standard_normal(m)
        var = gen.uniform(0.1, 4.0, size=m)
        res = linf_deflation(GaussianPair(delta, var), 0.0)
        ref = math.sqrt(float((delta**2 / var).sum()))
        assert res.delta_eps == pytest.approx(ref, rel=1e-12)
        assert np.allclose(res.z_opt, 0.0)


def test_linf_deflation_full_covariance_envelope():
    delta = np.array([2.0, 1.0])
    # Isotropic full covariance: the envelope pinches to the exact value.
    iso = GaussianPair(delta, 4.0 * np.eye(2))
    res = linf_deflation(iso, 0.5)
    t = np.array([1.5, 0.5])
    expect = float(np.linalg.norm(t)) / 2.0
    assert not res.exact
    assert res.delta_eps_lower == pytest.approx(expect, rel=1e-10)
    assert res.delta_eps_upper == pytest.approx(expect, rel=1e-10)
    assert res.delta_eps == res.delta_eps_upper

    # Singular direction: upper end (and delta_eps) go infinite.
    sing = GaussianPair(delta, np.array([[1.0, 1.0], [1.0, 1.0]]))
    res = linf_deflation(sing, 0.0)
    assert math.isinf(res.delta_eps)
    assert gaussian_err_bound(sing, 0.0) == 0.0


def test_gaussian_pair_validation():
    with pytest.raises(ValueError):
        GaussianPair(np.array([1.0]), np.array([-1.0]))  # negative variance
    with pytest.raises(ValueError):
        GaussianPair(np.array([1.0, 2.0]), np.array([[1.0, 0.5], [0.4, 1.0]]))
    with pytest.raises(ValueError):
        GaussianPair(np.array([1.0, 2.0]), -np.eye(2))  # negative definite


def test_gaussian_err_bound_consistency_and_saturation():
    pair = GaussianPair(np.array([3.0, 1.0]), np.array([1.0, 1.0]))
    err0 = gaussian_err_bound(pair, 0.0)
    d = linf_deflation(pair, 0.0).delta_eps
    assert err0 == pytest.approx(0.5 * (1.0 - gaussian_tv(d)), abs=1e-15)
    # eps covering the largest coordinate gap kills the distance entirely.
    assert gaussian_err_bound(pair, 3.0) == 0.5
    assert gaussian_err_bound(pair, 5.0) == 0.5
    sweep = [gaussian_err_bound(pair, e) for e in np.linspace(0.0, 4.0, 50)]
    assert all(b >= a - 1e-15 for a, b in zip(sweep, sweep[1:]))


def test_lighttail_bound():
    tail = lambda r: math.exp(-r)
    assert lighttail_bound(tail, 4.0) == pytest.approx(0.5 - math.exp(-2.0), rel=1e-12)
    assert lighttail_bound(tail, 0.0) == 0.0  # tail(0) = 1 clamps to zero
    assert lighttail_bound(tail, 3.0, mu_dist=1.0) == pytest.approx(
        0.5 - math.exp(-1.0), rel=1e-12
    )
    with pytest.raises(ValueError):
        lighttail_bound(tail, 0.5, mu_dist=1.0)


def test_moment_bound_reference_case():
    # Square moment at budget alpha = 1 read at effective radius 2.
    val = moment_bound(MomentFunction.power(2.0), 1.0, 4.0)
    assert val == pytest.approx(0.375, abs=1e-15)
    # Inside the moment ball the ratio saturates and the bound is zero.
    assert moment_bound(MomentFunction.power(2.0), 1.0, 1.0) == 0.0
    assert moment_bound(MomentFunction.power(2.0), 1.0, -3.0) == 0.0
    with pytest.raises(ValueError):
        moment_bound(MomentFunction.power(2.0), 0.0, 1.0)


def test_wasserstein_bound_reference_case():
    assert wasserstein_bound(1.0, 1.0, 2.0) == pytest.approx(0.25, abs=1e-15)
    assert wasserstein_bound(3.0, 2.0, 2.0) == 0.0  # distance above budget
    assert wasserstein_bound(0.0, 1.0, 1.0) == 0.5
    with pytest.raises(ValueError):
        wasserstein_bound(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        wasserstein_bound(1.0, 0.5, 1.0)


def test_dobrushin_constant_curve():
    theta = Grid1D((0.0, 10.0), (1.0, 1.0))
    for t in (0.25, 0.4, 1.0):
        val = dobrushin_bound(t, MomentFunction.power(2.0), 1.0, 0.0, theta)
        assert val == pytest.approx(0.5 * (1.0 - t), abs=1e-15)


def test_dobrushin_running_max_handles_dips():
    xs = tuple(np.linspace(0.0, 8.0, 30))
    base = np.clip(np.asarray(xs) / 8.0, 0.0, 1.0)
    dipped = base.copy()
    dipped[10] = 0.0  # a single bad sample must not lower the envelope
    clean = dobrushin_bound(0.5, MomentFunction.power(2.0), 1.0, 0.0,
                            Grid1D(xs, tuple(base)))
    noisy = dobrushin_bound(0.5, MomentFunction.power(2.0), 1.0, 0.0,
                            Grid1D(xs, tuple(dipped)))
    assert noisy == pytest.approx(clean, abs=1e-12)
    with pytest.raises(ValueError):
        dobrushin_bound(0.5, MomentFunction.power(2.0), 1.0, 0.0,
                        Grid1D((0.0, 1.0), (0.5, 1.5)))
    with pytest.raises(ValueError):
        dobrushin_bound(0.0, MomentFunction.power(2.0), 1.0, 0.0,
                        Grid1D((0.0, 1.0), (0.5, 1.0)))


def test_uap_bound_reference_case():
    val = uap_bound(1.0, MomentFunction.power(2.0), 1.0, 1.0)
    assert val == pytest.approx(1.0 - std_normal_cdf(1.0), abs=1e-15)
    assert val == pytest.approx(0.15865525393145705, abs=1e-12)
    with pytest.raises(ValueError):
        uap_bound(1.0, MomentFunction.power(2.0), 1.0, 0.0)


def test_dobrushin_with_gaussian_curve_matches_uap():
    # Feeding the Gaussian response curve through the envelope route must
    # land on the closed-form value when the read-off point is a grid node.
    t, alpha, c, delta = 0.7, 1.3, 0.8, 0.4
    mf = MomentFunction.power(2.0)
    r_star = 2.0 * mf.inverse(alpha / t) + delta
    xs = np.unique(np.concatenate([np.linspace(delta, delta + 4.0 * r_star, 801),
                                   [r_star]]))
    ys = tuple(2.0 * std_normal_cdf((x - delta) / (2.0 * c)) - 1.0 for x in xs)
    via_curve = dobrushin_bound(t, mf, alpha, delta, Grid1D(tuple(xs), ys))
    # The mean-gap shift cancels against the curve's own offset, so the
    # envelope route must reproduce the closed uap form.
    assert via_curve == pytest.approx(uap_bound(t, mf, alpha, c), abs=1e-12)


def test_noise_design_identity_and_rank_one():
    design = noise_design(np.eye(3), 3, 1.0)
    assert np.allclose(design.sigma_tilde, np.eye(3), atol=1e-12)
    assert design.alpha_star == pytest.approx(3.0, rel=1e-12)
    assert design.err_lower_bound is None

    design = noise_design(np.diag([1.0, 0.0]), 1, 0.5)
    assert np.allclose(design.sigma_tilde, np.diag([1.0, 0.0]), atol=1e-12)
    assert design.alpha_star == pytest.approx(1.0, rel=1e-12)


def test_noise_design_invariants_random():
    gen = np.random.default_rng(93)
    for _ in range(10):
        m = int(gen.integers(2, 8))
        h = gen.standard_normal((m, m))
        sigma0 = h @ h.T
        sigma0_sq = float(gen.uniform(0.2, 2.0))
        for r in range(1, m + 1):
            design = noise_design(sigma0, r, sigma0_sq)
            st = design.sigma_tilde
            assert np.trace(st) == pytest.approx(m * sigma0_sq, rel=1e-9)
            assert np.linalg.matrix_rank(st, tol=1e-8) <= r
            alpha_ref = float(np.trace(np.linalg.pinv(st) @ sigma0))
            assert design.alpha_star == pytest.approx(alpha_ref, rel=1e-8)
            cap = r * r * float(np.linalg.norm(sigma0, 2)) / (m * sigma0_sq)
            assert design.alpha_star <= cap * (1.0 + 1e-10)


def test_noise_design_err_bound_formula():
    sigma0 = np.diag([4.0, 1.0])
    design = noise_design(sigma0, 2, 1.0, t=0.5, delta_means=0.3)
    ssum = 3.0  # sqrt(4) + sqrt(1)
    arg = (ssum / math.sqrt(2.0) / math.sqrt(0.5) + 0.3 / math.sqrt(2.0)) / 1.0
    expect = 0.5 * (1.0 - 0.5 * (2.0 * std_normal_cdf(arg) - 1.0))
    assert design.err_lower_bound == pytest.approx(expect, abs=1e-15)


def test_noise_design_validation():
    with pytest.raises(ValueError):
        noise_design(np.zeros((2, 3)), 1, 1.0)
    with pytest.raises(ValueError):
        noise_design(np.eye(2), 0, 1.0)
    with pytest.raises(ValueError):
        noise_design(np.eye(2), 3, 1.0)
    with pytest.raises(ValueError):
        noise_design(np.eye(2), 1, 0.0)
    with pytest.raises(ValueError):
        noise_design(np.array([[1.0, 0.2], [0.0, 1.0]]), 1, 1.0)  # asymmetric
    with pytest.raises(ValueError):
        noise_design(-np.eye(2), 1, 1.0)
    with pytest.raises(ValueError):
        noise_design(np.zeros((2, 2)), 1, 1.0)  # nothing to align with


def test_contraction_constant_reference_cases():
    # m=3, p=2, ratio 1/2: regularized incomplete beta at (1/2, 2) of 1/4.
    assert contraction_constant(3, 2.0, 1.0, 1.0) == pytest.approx(0.6875, abs=1e-12)
    assert contraction_constant(1, INF, 1.0, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert contraction_constant(3, 2.0, 4.0, 1.0) == 1.0  # diameter covers 2 eps
    assert contraction_constant(2, INF, 0.0, 1.0) == 0.0
    vals = [contraction_constant(4, 2.0, 1.0, e) for e in np.linspace(0.3, 5.0, 30)]
    assert all(b <= a + 1e-15 for a, b in zip(vals, vals[1:]))  # fades with budget
    with pytest.raises(ValueError):
        contraction_constant(3, 1.5, 1.0, 1.0)
    with pytest.raises(ValueError):
        contraction_constant(0, 2.0, 1.0, 1.0)
    with pytest.raises(ValueError):
        contraction_constant(3, 2.0, 1.0, 0.0)
