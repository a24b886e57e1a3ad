"""Local fluctuation of smooth vector maps under l_p perturbations.

A map is linearized at a base point and its Jacobian is fed through the
worst-case / average-case machinery: the induced norm gives the adversarial
response, a sphere average gives the noise response, and the spectrum gives
closed-form lower bounds on their ratio.
"""

import math
from dataclasses import dataclass

import numpy as np

from .distortion import _ratio_factor
from .lp_geometry import LpSpace, _inv, check_exponent, lp_norm_rows, sample_lp
from .matrix_spectral import induced_norm, spectrum
from .rng import SeededRng

_KINK_MARGIN = 1e-7


def _act_pair(name):
    if name == "identity":
        return (lambda z: z, lambda z: np.ones_like(z))
    if name == "tanh":
        return (np.tanh, lambda z: 1.0 - np.tanh(z) ** 2)
    if name == "relu":
        return (lambda z: np.maximum(z, 0.0), lambda z: (z > 0.0).astype(float))
    raise ValueError(f"unknown activation {name!r}")


@dataclass(frozen=True)
class Layer:
    """Affine map plus pointwise activation: x -> act(weight @ x + bias)."""

    weight: np.ndarray
    bias: np.ndarray
    activation: str = "identity"

    def __post_init__(self):
        w = np.asarray(self.weight, dtype=np.float64)
        b = np.asarray(self.bias, dtype=np.float64)
        if w.ndim != 2:
            raise ValueError("layer weight must be 2-D")
        if b.shape != (w.shape[0],):
            raise ValueError("layer bias must match the weight row count")
        _act_pair(self.activation)
        object.__setattr__(self, "weight", w)
        object.__setattr__(self, "bias", b)


@dataclass(frozen=True)
class VectorMap:
    """A chain of layers, applied first to last."""

    layers: tuple

    def __post_init__(self):
        layers = tuple(self.layers)
        if not layers:
            raise ValueError("need at least one layer")
        for prev, cur in zip(layers, layers[1:]):
            if cur.weight.shape[1] != prev.weight.shape[0]:
                raise ValueError("layer dimensions do not chain")
        object.__setattr__(self, "layers", layers)

    @property
    def in_dim(self):
        return self.layers[0].weight.shape[1]

    @property
    def out_dim(self):
        return self.layers[-1].weight.shape[0]


def _forward(vm, x):
    # Returns the output and the per-layer pre-activations.
    pres = []
    for layer in vm.layers:
        z = layer.weight @ x + layer.bias
        pres.append(z)
        act, _ = _act_pair(layer.activation)
        x = act(z)
    return x, pres


def eval_map(vm, x):
    """Apply the map to a single input vector."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (vm.in_dim,):
        raise ValueError(f"expected input of shape ({vm.in_dim},)")
    return _forward(vm, x)[0]


def eval_map_batch(vm, xs):
    """Apply the map to each row of a 2-D array."""
    xs = np.asarray(xs, dtype=np.float64)
    if xs.ndim != 2 or xs.shape[1] != vm.in_dim:
        raise ValueError(f"expected rows of length {vm.in_dim}")
    for layer in vm.layers:
        act, _ = _act_pair(layer.activation)
        xs = act(xs @ layer.weight.T + layer.bias)
    return xs


def jacobian_analytic(vm, x):
    """Exact Jacobian by the chain rule."""
    x = np.asarray(x, dtype=np.float64)
    jac = None
    for layer in vm.layers:
        z = layer.weight @ x + layer.bias
        act, deriv = _act_pair(layer.activation)
        step = deriv(z)[:, None] * layer.weight
        jac = step if jac is None else step @ jac
        x = act(z)
    return jac


def jacobian_fd(f, x, step=1e-6):
    """Central-difference Jacobian of a VectorMap or a plain callable.

    Column j uses the offset step * max(1, |x_j|), so the probe scale tracks
    the magnitude of each coordinate.
    """
    if isinstance(f, VectorMap):
        fn = lambda v: eval_map(f, v)
    else:
        fn = lambda v: np.asarray(f(v), dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    cols = []
    for j in range(x.size):
        tau = step * max(1.0, abs(x[j]))
        hi = x.copy()
        lo = x.copy()
        hi[j] += tau
        lo[j] -= tau
        cols.append((fn(hi) - fn(lo)) / (2.0 * tau))
    return np.column_stack(cols)


def _relu_margin(vm, x):
    # Distance of the nearest relu pre-activation to its kink.
    margin = math.inf
    _, pres = _forward(vm, x)
    for layer, z in zip(vm.layers, pres):
        if layer.activation == "relu" and z.size:
            margin = min(margin, float(np.abs(z).min()))
    return margin


def _off_kink_point(vm, x, rng):
    # The Jacobian is ill-defined on a kink, so nudge the base point until
    # every relu pre-activation clears a small margin.
    for attempt in range(64):
        if _relu_margin(vm, x) >= _KINK_MARGIN:
            return x
        gen = rng.substream(10_000 + attempt).generator()
        x = x + 1e-6 * gen.standard_normal(x.size)
    raise RuntimeError("could not move the base point off a relu kink")


@dataclass(frozen=True)
class FluctuationReport:
    """Linearized worst-case and average-case response at a base point.

    delta_max scales the induced norm of the Jacobian by eps; its method tag
    tells whether the value is exact, brute-forced, or only a lower bound.
    delta_avg is the matching Monte Carlo sphere (or ball) average. The
    three bounds are closed-form floors on ratio, ordered
    corrected >= rank >= dimension.
    """

    eps: float
    p: float
    q: float
    delta_max: float
    method: str
    delta_avg: float
    delta_avg_stderr: float
    ratio: float
    ratio_stderr: float
    corrected_bound: float
    rank_bound: float
    dimension_bound: float


def fluctuation_certificate(f, x, p, q, eps, n, rng, surface="sphere",
                            budget=None, fd_step=1e-6):
    """Worst-vs-average fluctuation report for a map linearized at ``x``.

    ``f`` is a VectorMap (analytic Jacobian, relu kinks avoided by a seeded
    nudge) or any callable (finite differences). The average is over eps
    times the unit l_p sphere, or the ball when surface="ball".
    """
    p = check_exponent(p, "p")
    q = check_exponent(q, "q")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    if not isinstance(rng, SeededRng):
        raise TypeError("rng must be a SeededRng")
    x = np.asarray(x, dtype=np.float64)
    if isinstance(f, VectorMap):
        x = _off_kink_point(f, x, rng)
        jac = jacobian_analytic(f, x)
    else:
        jac = jacobian_fd(f, x, step=fd_step)
    k, m = jac.shape

    num = induced_norm(jac, p, q, budget=budget)
    u = sample_lp(LpSpace(m, p), surface, n, rng)
    vals = lp_norm_rows(u @ jac.T, q)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(n))
    if mean <= 0.0:
        raise ValueError("average response vanished; the map is locally zero")
    ratio = num.value / mean
    ratio_stderr = ratio * stderr / mean

    spec = spectrum(jac)
    factor = _ratio_factor(m, p)
    k_factor = k ** (-abs(0.5 - _inv(q)))
    corrected = spec.spectral / spec.frobenius * k_factor * factor
    rank_bound = k_factor * factor / math.sqrt(spec.rank)
    dim_bound = k_factor * factor / math.sqrt(min(k, m))

    return FluctuationReport(
        eps=eps, p=p, q=q,
        delta_max=eps * num.value, method=num.kind,
        delta_avg=eps * mean, delta_avg_stderr=eps * stderr,
        ratio=ratio, ratio_stderr=ratio_stderr,
        corrected_bound=corrected, rank_bound=rank_bound,
        dimension_bound=dim_bound,
    )
