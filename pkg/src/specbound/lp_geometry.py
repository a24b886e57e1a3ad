"""l_p norms, exponent bookkeeping, and uniform sampling on l_p spheres/balls.

Exponents live in [1, inf] with ``math.inf`` as the sentinel for the sup
norm; every case split on p uses the boundaries [1,2), [2,inf), {inf}. The
sphere sampler uses the generalized-normal construction (coordinates drawn
with density proportional to exp(-|t|^p), then normalized), which is exact
in every dimension; p = inf is sampled by picking a face of the cube.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .numerics import log_gamma
from .rng import SeededRng, draw_batched

__all__ = [
    "LpSpace",
    "SphereVariance",
    "lp_norm",
    "lp_norm_rows",
    "norm_equiv_bounds",
    "sample_lp",
    "sigma2",
    "theta_exponent",
]


def check_exponent(p: float, name: str = "p") -> float:
    p = float(p)
    if math.isnan(p) or p < 1.0:
        raise ValueError(f"{name} must lie in [1, inf], got {p}")
    return p


def _inv(p: float) -> float:
    return 0.0 if math.isinf(p) else 1.0 / p


@dataclass(frozen=True)
class LpSpace:
    """A normed domain (R^dim, l_p)."""

    dim: int
    p: float

    def __post_init__(self) -> None:
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))
        object.__setattr__(self, "p", check_exponent(self.p))


def theta_exponent(p: float, q: float) -> float:
    """The exponent (1/p - 1/q)_+ governing l_p/l_q dimension factors."""
    p = check_exponent(p, "p")
    q = check_exponent(q, "q")
    return max(0.0, _inv(p) - _inv(q))


def lp_norm(x, p: float) -> float:
    """l_p norm of a vector, max norm for p = inf."""
    p = check_exponent(p)
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("lp_norm expects a nonempty 1-D vector")
    return float(lp_norm_rows(x[None, :], p)[0])


def lp_norm_rows(x: np.ndarray, p: float) -> np.ndarray:
    """Row-wise l_p norms of a 2-D array."""
    p = check_exponent(p)
    x = np.asarray(x, dtype=float)
    ax = np.abs(x)
    if math.isinf(p):
        return ax.max(axis=1)
    if p == 1.0:
        return ax.sum(axis=1)
    if p == 2.0:
        with np.errstate(over="ignore"):
            out = np.sqrt((ax * ax).sum(axis=1))
        # Rows this small may have lost bits to subnormal squares (and inf
        # rows overflowed); redo just those with the scaled route.
        bad = np.isinf(out) | (out < 1e-140)
        if bad.any():
            sub = ax[bad]
            scale = sub.max(axis=1)
            fixed = out[bad]
            # rows holding a true inf (or all zeros) are already right
            pos = (scale > 0.0) & np.isfinite(scale)
            if pos.any():
                ratios = sub[pos] / scale[pos, None]
                fixed[pos] = scale[pos] * np.sqrt((ratios * ratios).sum(axis=1))
            out[bad] = fixed
        return out
    # Factor out the row maximum so large exponents cannot overflow.
    scale = ax.max(axis=1)
    out = np.zeros_like(scale)
    pos = scale > 0.0
    if pos.any():
        ratios = ax[pos] / scale[pos, None]
        out[pos] = scale[pos] * (ratios**p).sum(axis=1) ** (1.0 / p)
    return out


def norm_equiv_bounds(x, p: float, q: float) -> tuple[float, float]:
    """Two-sided l_q envelope of a vector from its l_p norm.

    Returns (d^(-theta_{p,q}) ||x||_p, d^(theta_{q,p}) ||x||_p), which
    bracket ||x||_q in dimension d.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("norm_equiv_bounds expects a nonempty 1-D vector")
    d = x.size
    np_norm = lp_norm(x, p)
    lower = d ** (-theta_exponent(p, q)) * np_norm
    upper = d ** (theta_exponent(q, p)) * np_norm
    nq = lp_norm(x, q)
    slack = 1e-12 * max(1.0, nq)
    if not (lower <= nq + slack and nq <= upper + slack):
        raise AssertionError(
            f"norm equivalence violated: {lower} <= {nq} <= {upper} (p={p}, q={q})"
        )
    return lower, upper


def _sphere_batch(gen: np.random.Generator, count: int, m: int, p: float) -> np.ndarray:
    if math.isinf(p):
        # One coordinate pinned to +-1 (a face of the cube), the rest uniform.
        pts = gen.uniform(-1.0, 1.0, size=(count, m))
        face = gen.integers(0, m, size=count)
        sign = 2.0 * gen.integers(0, 2, size=count) - 1.0
        pts[np.arange(count), face] = sign
        return pts
    if p == 2.0:
        raw = gen.standard_normal(size=(count, m))
    elif p == 1.0:
        sign = 2.0 * gen.integers(0, 2, size=(count, m)) - 1.0
        raw = sign * gen.standard_exponential(size=(count, m))
    else:
        sign = 2.0 * gen.integers(0, 2, size=(count, m)) - 1.0
        raw = sign * gen.standard_gamma(1.0 / p, size=(count, m)) ** (1.0 / p)
    norms = lp_norm_rows(raw, p)
    return raw / norms[:, None]


def sample_lp(space: LpSpace, surface: str, n: int, rng: SeededRng) -> np.ndarray:
    """n i.i.d. points uniform on the unit l_p sphere or ball of the space.

    Ball points are sphere points pushed inward by a U^(1/m) radius factor;
    for p = inf the ball is sampled directly (all coordinates uniform).
    """
    if surface not in ("sphere", "ball"):
        raise ValueError(f"surface must be 'sphere' or 'ball', got {surface!r}")
    if n < 1:
        raise ValueError("sample count must be >= 1")
    m, p = space.dim, space.p

    if surface == "sphere":
        def draw(gen: np.random.Generator, count: int) -> np.ndarray:
            return _sphere_batch(gen, count, m, p)
    elif math.isinf(p):
        def draw(gen: np.random.Generator, count: int) -> np.ndarray:
            return gen.uniform(-1.0, 1.0, size=(count, m))
    else:
        def draw(gen: np.random.Generator, count: int) -> np.ndarray:
            pts = _sphere_batch(gen, count, m, p)
            radius = gen.uniform(0.0, 1.0, size=(count, 1)) ** (1.0 / m)
            return pts * radius

    return draw_batched(rng, n, draw)


@dataclass(frozen=True)
class SphereVariance:
    """Per-coordinate variance of a uniform point on the unit l_p sphere.

    ``exact`` is the closed-form gamma-ratio value (for p = inf, the exact
    variance of the face sampler, (m+2)/(3m)); ``asymptotic`` is the large-m
    approximation proportional to m^(-2/p); ``bound`` is the case-split
    upper bound 2 m^(-2/p) on [1,2), m^(-2/p) on [2,inf), and 1/3 at inf.
    The bound dominates ``exact`` for finite p; at p = inf it is the
    limiting value itself, which the face sampler approaches from above.
    """

    exact: float
    asymptotic: float
    bound: float


def sigma2(space: LpSpace) -> SphereVariance:
    m, p = space.dim, space.p
    if math.isinf(p):
        return SphereVariance(exact=(m + 2.0) / (3.0 * m), asymptotic=1.0 / 3.0, bound=1.0 / 3.0)
    if p == 2.0:
        # Gamma ratio telescopes; take the rational value directly.
        exact = 1.0 / m
    elif p == 1.0:
        exact = 2.0 / (m * (m + 1.0))
    else:
        exact = math.exp(
            log_gamma(m / p) + log_gamma(3.0 / p) - log_gamma(1.0 / p) - log_gamma((m + 2.0) / p)
        )
    asymptotic = p ** (2.0 / p) * math.exp(log_gamma(3.0 / p) - log_gamma(1.0 / p)) * m ** (-2.0 / p)
    bound = (2.0 if p < 2.0 else 1.0) * m ** (-2.0 / p)
    return SphereVariance(exact=exact, asymptotic=asymptotic, bound=bound)
