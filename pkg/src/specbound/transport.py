"""Adversarial-error transport between empirical samples.

The quantity of interest is the smallest probability mass that cannot be
coupled between two samples when an atom of one may be matched to any atom
of the other within an attack relation (an l_p ball of radius eps, or an
arbitrary predicate). Three routes compute it:

* tv_eps_matching: uniform weights, maximum bipartite matching;
* ot_maxflow: arbitrary weights, max flow on the coupling network;
* strassen_enumerate: small instances, exact subset enumeration by duality.

The first two return transport plans; the routes are kept independent so
they can certify each other in tests.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import dinic_maxflow, hopcroft_karp
from .lp_geometry import check_exponent, lp_norm_rows

_MASS_TOL = 1e-9


@dataclass(frozen=True)
class EmpiricalSample:
    """Weighted point cloud; weights default to uniform and must sum to 1."""

    points: np.ndarray
    weights: np.ndarray = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] == 0:
            raise ValueError("points must be a nonempty 2-D array")
        if not np.isfinite(pts).all():
            raise ValueError("points must be finite")
        n = pts.shape[0]
        if self.weights is None:
            w = np.full(n, 1.0 / n)
        else:
            w = np.asarray(self.weights, dtype=np.float64)
            if w.shape != (n,):
                raise ValueError("weights must have one entry per point")
            if (w < 0.0).any():
                raise ValueError("weights must be nonnegative")
            if abs(float(w.sum()) - 1.0) > _MASS_TOL:
                raise ValueError("weights must sum to 1")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def is_uniform(self):
        return bool(np.allclose(self.weights, 1.0 / self.n, rtol=1e-9, atol=0.0))


@dataclass(frozen=True)
class AttackModel:
    """Which atoms of one sample an adversary can map to atoms of another."""

    kind: str
    p: float = math.nan
    eps: float = math.nan
    fn: object = None

    @staticmethod
    def metric(p, eps):
        """Adjacent iff the l_p distance is at most eps."""
        p = check_exponent(p, "p")
        eps = float(eps)
        if not (eps >= 0.0):
            raise ValueError("eps must be nonnegative")
        return AttackModel("metric", p=p, eps=eps)

    @staticmethod
    def predicate(fn):
        """Adjacent iff fn(x, y) is truthy."""
        return AttackModel("predicate", fn=fn)

    def adjacency(self, x1, x2):
        """Boolean n1 x n2 matrix of admissible pairs."""
        x1 = np.asarray(x1, dtype=np.float64)
        x2 = np.asarray(x2, dtype=np.float64)
        if x1.shape[1] != x2.shape[1]:
            raise ValueError("point clouds live in different dimensions")
        n1, n2 = x1.shape[0], x2.shape[0]
        if self.kind == "metric":
            diff = (x1[:, None, :] - x2[None, :, :]).reshape(n1 * n2, -1)
            dist = lp_norm_rows(diff, self.p).reshape(n1, n2)
            return dist <= self.eps
        out = np.zeros((n1, n2), dtype=bool)
        for i in range(n1):
            for j in range(n2):
                out[i, j] = bool(self.fn(x1[i], x2[j]))
        return out


@dataclass(frozen=True)
class TransportResult:
    """Uncoupled mass plus the coupling that attains it.

    value is the adversarial error (mass that cannot be moved), plan is a
    tuple of (left index, right index, mass) triples, and the unmatched
    tuples list atoms with leftover mass.
    """

    value: float
    matched_mass: float
    unmatched_left: tuple
    unmatched_right: tuple
    plan: tuple


def _adjacency_csr(adj):
    indptr = np.zeros(adj.shape[0] + 1, dtype=np.int64)
    np.cumsum(adj.sum(axis=1), out=indptr[1:])
    indices = np.nonzero(adj)[1].astype(np.int64)
    return indptr, indices


def tv_eps_matching(sample1, sample2, attack):
    """Adversarial error between uniform samples by maximum matching.

    Each matched pair carries mass min(1/n1, 1/n2); the value averages the
    unmatched fractions of the two sides. With n1 == n2 that equals the
    coupling optimum; with n1 != n2 it is the matching-based sample
    estimator, which can exceed ot_maxflow's exact coupling value. Weighted
    samples must go through ot_maxflow instead.
    """
    if not (sample1.is_uniform and sample2.is_uniform):
        raise ValueError("tv_eps_matching needs uniform weights; use ot_maxflow")
    adj = attack.adjacency(sample1.points, sample2.points)
    n1, n2 = adj.shape
    indptr, indices = _adjacency_csr(adj)
    size, pair_l, pair_r = hopcroft_karp(indptr, indices, n1, n2)
    size = int(size)
    pair_l = np.asarray(pair_l)
    pair_r = np.asarray(pair_r)
    value = 0.5 * ((n1 - size) / n1 + (n2 - size) / n2)
    mass = min(1.0 / n1, 1.0 / n2)
    plan = tuple(
        (int(i), int(pair_l[i]), mass) for i in range(n1) if pair_l[i] >= 0
    )
    return TransportResult(
        value=float(value),
        matched_mass=size * mass,
        unmatched_left=tuple(np.nonzero(pair_l < 0)[0].tolist()),
        unmatched_right=tuple(np.nonzero(pair_r < 0)[0].tolist()),
        plan=plan,
    )


def ot_maxflow(sample1, sample2, attack):
    """Adversarial error between weighted samples by maximum flow.

    Network: source -> left atom (capacity = its weight), admissible pairs
    (capacity 2, effectively unbounded), right atom -> sink. The coupled
    mass is the max flow; the value is the deficit from 1.
    """
    adj = attack.adjacency(sample1.points, sample2.points)
    n1, n2 = adj.shape
    w1, w2 = sample1.weights, sample2.weights
    pairs = np.argwhere(adj)
    s, t = 0, 1 + n1 + n2
    eu = np.concatenate([
        np.zeros(n1, dtype=np.int64),
        1 + n1 + np.arange(n2, dtype=np.int64),
        1 + pairs[:, 0].astype(np.int64),
    ])
    ev = np.concatenate([
        1 + np.arange(n1, dtype=np.int64),
        np.full(n2, t, dtype=np.int64),
        1 + n1 + pairs[:, 1].astype(np.int64),
    ])
    cap = np.concatenate([w1, w2, np.full(len(pairs), 2.0)])
    total, eflow = dinic_maxflow(t + 1, eu, ev, cap, s, t)
    total = float(total)
    eflow = np.asarray(eflow)

    pair_flow = eflow[n1 + n2:]
    keep = pair_flow > 1e-12
    plan = tuple(
        (int(i), int(j), float(f))
        for (i, j), f in zip(pairs[keep], pair_flow[keep])
    )
    left_res = w1 - eflow[:n1]
    right_res = w2 - eflow[n1:n1 + n2]
    return TransportResult(
        value=max(0.0, 1.0 - total),
        matched_mass=total,
        unmatched_left=tuple(np.nonzero(left_res > _MASS_TOL)[0].tolist()),
        unmatched_right=tuple(np.nonzero(right_res > _MASS_TOL)[0].tolist()),
        plan=plan,
    )


def strassen_enumerate(sample1, sample2, attack):
    """Exact adversarial error by enumerating left subsets.

    Duality: the uncoupled mass equals the largest excess of a left subset
    over the total weight of its admissible right neighborhood. Left subsets
    are enumerated as bitmasks, so this is an oracle for small instances
    only (n1 <= 20, n2 <= 62).
    """
    adj = attack.adjacency(sample1.points, sample2.points)
    n1, n2 = adj.shape
    if n1 > 20:
        raise ValueError("subset enumeration capped at 20 left atoms")
    if n2 > 62:
        raise ValueError("right neighborhoods capped at 62 atoms")
    w1, w2 = sample1.weights, sample2.weights
    nb = np.zeros(n1, dtype=np.int64)
    for i in range(n1):
        nb[i] = int.from_bytes(
            np.packbits(adj[i], bitorder="little").tobytes(), "little"
        )
    size = 1 << n1
    closure = np.zeros(size, dtype=np.int64)
    amass = np.zeros(size)
    # Fill by lowest set bit, highest bit index first, so every x ^ lowbit(x)
    # is already complete when its group is processed.
    for i in range(n1 - 1, -1, -1):
        bit = 1 << i
        xs = bit + (np.arange(size >> (i + 1), dtype=np.int64) << (i + 1))
        closure[xs] = closure[xs - bit] | nb[i]
        amass[xs] = amass[xs - bit] + w1[i]
    bmass = np.zeros(size)
    for j in range(n2):
        bmass += w2[j] * ((closure >> j) & 1)
    return float(max(0.0, (amass - bmass).max()))
