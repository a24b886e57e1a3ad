"""Closed-form lower bounds on adversarial error and related constants.

Every evaluator here is an explicit formula: Gaussian total variation and
its l_inf-deflated corollary, tail/moment/Wasserstein bounds driven by a
moment function, the Dobrushin-curve bound, the universal-perturbation
existence bound, the optimal low-rank noise design, and the TV contraction
constants of metric attacks. Error probabilities are clamped to [0, 1/2],
the random-guessing floor.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ._kernels import jacobi_eigh
from .numerics import Grid1D, concave_envelope, reg_inc_beta, std_normal_cdf

INF = math.inf


def _clamp_err(v):
    return min(max(v, 0.0), 0.5)


@dataclass(frozen=True)
class MomentFunction:
    """Increasing convex M with M(0) = 0, with an exact analytic inverse.

    Kinds: power (M(r) = r^p, p >= 1) and subgaussian
    (M(r) = exp(r^2/sigma^2) - 1, sigma > 0).
    """

    kind: str
    param: float

    def __post_init__(self):
        if self.kind not in ("power", "subgaussian"):
            raise ValueError(f"unknown moment function kind {self.kind!r}")
        p = float(self.param)
        if self.kind == "power" and not p >= 1.0:
            raise ValueError("power exponent must be >= 1")
        if self.kind == "subgaussian" and not p > 0.0:
            raise ValueError("subgaussian scale must be positive")
        object.__setattr__(self, "param", p)

    @staticmethod
    def power(p):
        return MomentFunction("power", p)

    @staticmethod
    def subgaussian(sigma):
        return MomentFunction("subgaussian", sigma)

    def value(self, r):
        if not r >= 0.0:
            raise ValueError("moment functions are defined on r >= 0")
        if self.kind == "power":
            return float(r) ** self.param
        return math.expm1((float(r) / self.param) ** 2)

    def inverse(self, y):
        if not y >= 0.0:
            raise ValueError("moment function inverse needs y >= 0")
        if self.kind == "power":
            return float(y) ** (1.0 / self.param)
        return self.param * math.sqrt(math.log1p(float(y)))


@dataclass(frozen=True)
class GaussianPair:
    """Mean gap delta and shared covariance, diagonal (vector) or full."""

    delta: np.ndarray
    sigma: np.ndarray

    def __post_init__(self):
        delta = np.asarray(self.delta, dtype=np.float64)
        sigma = np.asarray(self.sigma, dtype=np.float64)
        if delta.ndim != 1 or delta.size == 0 or not np.isfinite(delta).all():
            raise ValueError("delta must be a nonempty finite vector")
        m = delta.size
        if sigma.ndim == 1:
            if sigma.shape != (m,):
                raise ValueError("diagonal sigma must match delta's length")
            if not np.isfinite(sigma).all() or (sigma < 0.0).any():
                raise ValueError("diagonal sigma must be nonnegative")
        elif sigma.ndim == 2:
            if sigma.shape != (m, m):
                raise ValueError("sigma must be m x m")
            if not np.isfinite(sigma).all():
                raise ValueError("sigma must be finite")
            scale = max(1.0, float(np.abs(sigma).max()))
            if float(np.abs(sigma - sigma.T).max()) > 1e-9 * scale:
                raise ValueError("sigma must be symmetric")
            eigvals, _ = jacobi_eigh(sigma)
            lam = np.asarray(eigvals)
            if lam.min() < -1e-10 * max(1.0, float(lam.max())):
                raise ValueError("sigma must be positive semidefinite")
        else:
            raise ValueError("sigma must be a vector (diagonal) or a matrix")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "sigma", sigma)

    @property
    def is_diagonal(self):
        return self.sigma.ndim == 1


def gaussian_tv(delta_norm):
    """Total variation between unit-variance Gaussians at mean distance
    delta_norm (in the Mahalanobis metric): 2 Phi(delta_norm/2) - 1."""
    if not delta_norm >= 0.0:
        raise ValueError("delta_norm must be nonnegative")
    return 2.0 * std_normal_cdf(delta_norm / 2.0) - 1.0


@dataclass(frozen=True)
class DeflationResult:
    """Mahalanobis length of the mean gap after an l_inf budget deflation.

    Diagonal covariances give the exact value (lower == upper == delta_eps);
    a full covariance is bracketed through its extreme eigenvalues and
    delta_eps is the upper end, the side that keeps the downstream error
    bound valid.
    """

    delta_eps: float
    s_vector: np.ndarray
    z_opt: np.ndarray
    exact: bool
    delta_eps_lower: float
    delta_eps_upper: float


def linf_deflation(pair, eps):
    """Deflate each coordinate of the mean gap by eps, then measure it.

    z_opt is the attack point: the l_inf projection of delta onto the
    eps-ball, i.e. delta with every coordinate shrunk toward 0 by eps.
    """
    if not eps >= 0.0:
        raise ValueError("eps must be nonnegative")
    delta = pair.delta
    mag = np.abs(delta)
    deflated = np.maximum(mag - eps, 0.0)
    z_opt = delta - np.sign(delta) * deflated
    if pair.is_diagonal:
        sd = np.sqrt(pair.sigma)
        with np.errstate(divide="ignore", invalid="ignore"):
            s = np.where(deflated == 0.0, 0.0, deflated / sd)
        value = float(np.sqrt((s * s).sum())) if np.isfinite(s).all() else INF
        return DeflationResult(value, s, z_opt, True, value, value)
    eigvals, _ = jacobi_eigh(pair.sigma)
    lam = np.maximum(np.asarray(eigvals), 0.0)
    tnorm = float(np.sqrt((deflated * deflated).sum()))
    lo = 0.0 if tnorm == 0.0 else tnorm / math.sqrt(float(lam[0]))
    if tnorm == 0.0:
        hi = 0.0
    elif float(lam[-1]) == 0.0:
        hi = INF
    else:
        hi = tnorm / math.sqrt(float(lam[-1]))
    return DeflationResult(hi, deflated, z_opt, False, lo, hi)


def gaussian_err_bound(pair, eps):
    """Lower bound on the eps-robust error of the two-Gaussian problem:
    1 - Phi(delta_eps / 2). Exactly 0.5 once eps covers the whole gap."""
    res = linf_deflation(pair, eps)
    if math.isinf(res.delta_eps):
        return 0.0
    return _clamp_err(1.0 - std_normal_cdf(res.delta_eps / 2.0))


def lighttail_bound(tail_fn, eps, mu_dist=0.0):
    """Error floor from a class-conditional tail function.

    tail_fn(r) bounds the probability a point sits more than r from its
    class mean; eps must cover the distance mu_dist between the means.
    """
    if not mu_dist >= 0.0:
        raise ValueError("mu_dist must be nonnegative")
    if eps < mu_dist:
        raise ValueError("need eps >= mu_dist for the light-tail bound")
    eps_eff = (eps - mu_dist) / 2.0
    return _clamp_err(0.5 - float(tail_fn(eps_eff)))


def moment_bound(moment, alpha, eps, mu_dist=0.0):
    """Error floor when the class-conditional M-moment is at most alpha."""
    if not alpha > 0.0:
        raise ValueError("alpha must be positive")
    if not mu_dist >= 0.0:
        raise ValueError("mu_dist must be nonnegative")
    eps_eff = (eps - mu_dist) / 2.0
    if eps_eff <= 0.0:
        ratio = 1.0
    else:
        m_val = moment.value(eps_eff)
        ratio = 1.0 if m_val <= alpha else alpha / m_val
    return _clamp_err(0.5 * (1.0 - ratio))


def wasserstein_bound(w, p, eps):
    """Error floor from the order-p Wasserstein distance between classes."""
    if not w >= 0.0:
        raise ValueError("w must be nonnegative")
    if not p >= 1.0:
        raise ValueError("p must be >= 1")
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    return _clamp_err(0.5 * (1.0 - (w / eps) ** p))


def _check_t(t):
    if not (0.0 < t <= 1.0):
        raise ValueError("t must lie in (0, 1]")
    return float(t)


def dobrushin_bound(t, moment, alpha, delta_means, theta):
    """Error floor through a sampled Dobrushin curve.

    theta is a Grid1D of curve samples in [0, 1]. The curve is made
    nondecreasing by a running max, concavified (capped at 1), and read off
    at 2 M^{-1}(alpha/t) + delta_means; outside the grid the envelope
    extends flat.
    """
    t = _check_t(t)
    if not delta_means >= 0.0:
        raise ValueError("delta_means must be nonnegative")
    ys = np.asarray(theta.ys)
    if (ys < 0.0).any() or (ys > 1.0).any():
        raise ValueError("theta values must lie in [0, 1]")
    running = np.maximum.accumulate(ys)
    env = concave_envelope(Grid1D(theta.xs, tuple(running)), max_value=1.0)
    r_star = 2.0 * moment.inverse(alpha / t) + delta_means
    return _clamp_err(0.5 * (1.0 - t * env(r_star)))


def uap_bound(t, moment, alpha, c):
    """Error floor certifying a universal perturbation of per-coordinate
    scale c: (1/2)(1 - t(2 Phi(M^{-1}(alpha/t)/c) - 1))."""
    t = _check_t(t)
    if not c > 0.0:
        raise ValueError("c must be positive")
    r = moment.inverse(alpha / t)
    return _clamp_err(0.5 * (1.0 - t * (2.0 * std_normal_cdf(r / c) - 1.0)))


@dataclass(frozen=True)
class NoiseDesign:
    """Rank-constrained noise covariance with its alignment constant."""

    sigma_tilde: np.ndarray
    alpha_star: float
    err_lower_bound: Optional[float]


def noise_design(sigma0, r, sigma0_sq, t=None, delta_means=0.0):
    """Best rank-r noise covariance of per-coordinate power sigma0_sq.

    The design keeps the top r eigendirections of the data covariance
    sigma0, with weights proportional to the singular values; its trace is
    exactly m * sigma0_sq. alpha_star is the resulting alignment
    trace(pinv(sigma_tilde) @ sigma0). When t is given, the matching error
    lower bound is evaluated at mean gap delta_means.
    """
    sigma0 = np.asarray(sigma0, dtype=np.float64)
    if sigma0.ndim != 2 or sigma0.shape[0] != sigma0.shape[1]:
        raise ValueError("sigma0 must be a square matrix")
    m = sigma0.shape[0]
    if not (isinstance(r, (int, np.integer)) and 1 <= r <= m):
        raise ValueError("rank budget r must be an integer in [1, m]")
    if not sigma0_sq > 0.0:
        raise ValueError("sigma0_sq must be positive")
    scale = max(1.0, float(np.abs(sigma0).max()))
    if float(np.abs(sigma0 - sigma0.T).max()) > 1e-9 * scale:
        raise ValueError("sigma0 must be symmetric")
    eigvals, eigvecs = jacobi_eigh(sigma0)
    lam = np.asarray(eigvals)
    vecs = np.asarray(eigvecs)
    if lam.min() < -1e-10 * max(1.0, float(lam.max())):
        raise ValueError("sigma0 must be positive semidefinite")
    s = np.sqrt(np.maximum(lam, 0.0))[:r]
    ssum = float(s.sum())
    if ssum == 0.0:
        raise ValueError("sigma0 is zero; nothing to align the noise with")
    v_r = vecs[:, :r]
    sigma_tilde = (m * sigma0_sq / ssum) * (v_r * s) @ v_r.T
    sigma_tilde = 0.5 * (sigma_tilde + sigma_tilde.T)
    alpha_star = ssum**2 / (m * sigma0_sq)

    err = None
    if t is not None:
        t = _check_t(t)
        if not delta_means >= 0.0:
            raise ValueError("delta_means must be nonnegative")
        sigma_bar = ssum / math.sqrt(m)
        arg = (sigma_bar / math.sqrt(t) + delta_means / math.sqrt(m))
        arg /= math.sqrt(sigma0_sq)
        err = _clamp_err(0.5 * (1.0 - t * (2.0 * std_normal_cdf(arg) - 1.0)))
    return NoiseDesign(sigma_tilde, alpha_star, err)


def contraction_constant(m, p, diam, eps):
    """TV contraction factor of an eps-budget l_p attack on a set of the
    given diameter: attacks can erase at most this fraction of TV."""
    if not (isinstance(m, (int, np.integer)) and m >= 1):
        raise ValueError("m must be a positive integer")
    if not eps > 0.0:
        raise ValueError("eps must be positive")
    if not diam >= 0.0:
        raise ValueError("diam must be nonnegative")
    ratio = diam / (2.0 * eps)
    if p == 2.0:
        return reg_inc_beta(min(ratio, 1.0) ** 2, 0.5, (m + 1) / 2.0)
    if math.isinf(p):
        return 1.0 - max(0.0, 1.0 - ratio) ** m
    raise ValueError("contraction constant is defined for p in {2, inf}")
