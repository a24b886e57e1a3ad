"""Average-distortion estimates and the Frobenius / ratio certificates."""

import math

import numpy as np
import pytest

from specbound.distortion import (
    BoundCertificate,
    and_estimate,
    and_estimate_multi,
    frobenius_certificate,
    frobenius_constant,
    ratio_certificate,
)
from specbound.rng import SeededRng

INF = math.inf


def test_and_estimate_identity_is_exact():
    # |I u|_p = 1 for every sphere point: mean 1, zero spread.
    est = and_estimate(np.eye(6), 2.0, 2.0, 256, SeededRng(0))
    assert est.value == pytest.approx(1.0, abs=1e-12)
    assert est.stderr <= 1e-12


def test_and_estimate_multi_shares_the_draws():
    gen_matrix = np.random.default_rng(51).standard_normal((4, 5))
    multi = and_estimate_multi(gen_matrix, 1.5, [1.0, 2.0, INF], 2000, SeededRng(3))
    for est, q in zip(multi, (1.0, 2.0, INF)):
        single = and_estimate(gen_matrix, 1.5, q, 2000, SeededRng(3))
        assert est.value == single.value
        assert est.stderr == single.stderr
        assert est.q == q and est.p == 1.5 and est.n == 2000


def test_and_estimate_validation():
    a = np.ones((2, 2))
    with pytest.raises(ValueError):
        and_estimate(a, 2.0, 2.0, 1, SeededRng(0))
    with pytest.raises(TypeError):
        and_estimate(a, 2.0, 2.0, 10, np.random.default_rng(0))


def test_bound_certificate_verdicts():
    holds = BoundCertificate.upper(1.0, 0.1, 1.2, 1.0)
    assert holds.verdict == "holds"
    assert holds.slack_sigmas == pytest.approx(2.0)

    noise = BoundCertificate.upper(1.2, 0.1, 1.0, 1.0)
    assert noise.verdict == "holds_within_noise"

    violated = BoundCertificate.upper(2.0, 0.1, 1.0, 1.0)
    assert violated.verdict == "violated"
    assert violated.slack_sigmas == pytest.approx(-10.0)

    lower = BoundCertificate.lower(2.0, 0.1, 1.0, 1.0)
    assert lower.verdict == "holds"


def test_bound_certificate_tight_and_noiseless_edges():
    # A last-ulp overshoot of an exactly tight bound must still hold.
    tight = BoundCertificate.upper(1.0 + 1e-13, 0.0, 1.0, 1.0)
    assert tight.verdict == "holds"
    assert tight.slack_sigmas == INF
    bad = BoundCertificate.upper(1.1, 0.0, 1.0, 1.0)
    assert bad.verdict == "violated"
    assert bad.slack_sigmas == -INF


def test_frobenius_constant_cases():
    # k-exponent only bites for q < 2; the p cases switch at 2 and infinity.
    assert frobenius_constant(4, 9, 1.0, 1.0) == pytest.approx(4.0 / (3.0 * math.sqrt(2.0)))
    assert frobenius_constant(4, 9, 2.0, 2.0) == pytest.approx(2.0)
    assert frobenius_constant(4, 9, 2.0, 3.0) == pytest.approx(2.0)
    assert frobenius_constant(8, 16, 3.0, 1.0) == pytest.approx(8.0 ** (1 / 3) / 4.0)
    # exact face-sampler constant; sqrt(3) is only its large-m limit
    assert frobenius_constant(5, 7, INF, 2.0) == pytest.approx(math.sqrt(15.0 / 7.0))
    assert frobenius_constant(50_000, 7, INF, 2.0) == pytest.approx(math.sqrt(3.0), rel=1e-4)


def test_frobenius_certificate_identity_is_exactly_tight():
    # For A = I, p = q = 2: estimate 1 meets bound |I|_F / sqrt(m) = 1.
    cert = frobenius_certificate(np.eye(7), 2.0, 2.0, n=128, rng=SeededRng(1))
    assert cert.verdict == "holds"
    assert cert.bound == pytest.approx(1.0, abs=1e-12)
    assert cert.estimate == pytest.approx(1.0, abs=1e-12)


def test_frobenius_certificate_requires_inputs():
    with pytest.raises(ValueError):
        frobenius_certificate(np.eye(2), 2.0, 2.0)


def test_frobenius_certificate_random_battery_small():
    gen = np.random.default_rng(52)
    rng = SeededRng(20)
    case = 0
    for _ in range(8):
        k = int(gen.integers(2, 10))
        m = int(gen.integers(2, 10))
        a = gen.standard_normal((k, m))
        for p in (1.0, 2.0, INF):
            ests = and_estimate_multi(a, p, [1.0, 2.0, INF], 4000, rng.substream(case))
            case += 1
            for est in ests:
                cert = frobenius_certificate(a, p, est.q, estimate=est)
                assert cert.verdict in ("holds", "holds_within_noise")
                assert cert.direction == "upper"


def test_ratio_certificate_identity_p2q2():
    cert = ratio_certificate(np.eye(5), 2.0, 2.0, n=512, rng=SeededRng(2))
    assert cert.numerator.kind == "exact"
    assert not cert.numerator_lower_bound
    # sigma_1/|I|_F * sqrt(m) = 1 and the measured ratio is exactly 1.
    assert cert.ratio_estimate == pytest.approx(1.0, abs=1e-12)
    assert cert.corrected_bound == pytest.approx(1.0, abs=1e-12)
    assert cert.corrected.verdict == "holds"
    assert cert.rank_relaxed_bound == pytest.approx(1.0, abs=1e-12)


def test_ratio_certificate_zero_matrix_rejected():
    with pytest.raises(ValueError):
        ratio_certificate(np.zeros((3, 3)), 2.0, 2.0, n=16, rng=SeededRng(0))


def test_ratio_bounds_ordering_and_uncorrected_coincidence():
    gen = np.random.default_rng(53)
    for _ in range(10):
        a = gen.standard_normal((int(gen.integers(2, 8)), int(gen.integers(2, 8))))
        for p, q in ((1.0, 1.5), (2.0, 2.0), (1.0, INF), (2.0, 1.0)):
            cert = ratio_certificate(a, p, q, n=1500, rng=SeededRng(7))
            # rank relaxation can only weaken the corrected bound.
            assert cert.rank_relaxed_bound <= cert.corrected_bound * (1 + 1e-12)
            if q <= 2.0:
                assert cert.uncorrected_bound == pytest.approx(cert.corrected_bound)
            else:
                assert cert.uncorrected_bound >= cert.corrected_bound


def test_ratio_certificate_exact_battery_small():
    gen = np.random.default_rng(54)
    rng = SeededRng(30)
    case = 0
    for _ in range(8):
        k = int(gen.integers(2, 9))
        m = int(gen.integers(2, 9))
        a = gen.standard_normal((k, m))
        for p, q in ((1.0, 2.0), (1.0, INF), (2.0, 2.0), (3.0, INF), (INF, 1.5)):
            cert = ratio_certificate(a, p, q, n=4000, rng=rng.substream(case))
            case += 1
            assert not cert.numerator_lower_bound
            assert cert.corrected.verdict in ("holds", "holds_within_noise")
            assert cert.rank_relaxed.verdict in ("holds", "holds_within_noise")


def test_ratio_certificate_lower_bound_numerator_never_violates():
    # With an ascent numerator the corrected verdict may be inconclusive but
    # must never claim an outright violation.
    gen = np.random.default_rng(55)
    for _ in range(6):
        a = gen.standard_normal((5, 4))
        cert = ratio_certificate(a, 1.5, 2.5, n=800, rng=SeededRng(9))
        assert cert.numerator_lower_bound
        for bc in (cert.corrected, cert.uncorrected, cert.rank_relaxed):
            assert bc.verdict != "violated"
