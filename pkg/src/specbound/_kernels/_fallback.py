"""Pure NumPy/Python kernels, interface-identical to the compiled core.

These are the reference implementations: the compiled extension mirrors the
same algorithms loop for loop. Anything here must stay importable with no
toolchain present.
"""

from __future__ import annotations

import math
from collections import deque

import numpy as np

from ..lp_geometry import lp_norm_rows

__all__ = ["dinic_maxflow", "hopcroft_karp", "jacobi_eigh", "sign_vertex_max"]


def jacobi_eigh(s: np.ndarray, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns (eigenvalues descending, eigenvectors as matching columns).
    """
    a = np.array(s, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("jacobi_eigh expects a square matrix")
    n = a.shape[0]
    v = np.eye(n)
    if n > 1:
        fro2 = float((a * a).sum())
        prev_off2 = math.inf
        for sweep in range(max_sweeps):
            od = a.copy()
            np.fill_diagonal(od, 0.0)
            # summed directly: the fro2-minus-diagonal form cancels
            # catastrophically near convergence and can stall sweeps while
            # off-diagonal entries are still ~1e-8
            off2 = float((od * od).sum())
            if off2 <= 1e-30 * fro2 or off2 >= prev_off2:
                break
            prev_off2 = off2
            # Threshold strategy: skip small pivots in the first sweeps.
            thresh = 0.2 * math.sqrt(off2) / n if sweep < 4 else 0.0
            for i in range(n - 1):
                for j in range(i + 1, n):
                    apq = a[i, j]
                    if apq == 0.0 or abs(apq) <= thresh:
                        continue
                    tau = (a[j, j] - a[i, i]) / (2.0 * apq)
                    if tau >= 0.0:
                        t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                    c = 1.0 / math.sqrt(1.0 + t * t)
                    sn = t * c
                    ri, rj = a[i, :].copy(), a[j, :].copy()
                    a[i, :] = c * ri - sn * rj
                    a[j, :] = sn * ri + c * rj
                    ci, cj = a[:, i].copy(), a[:, j].copy()
                    a[:, i] = c * ci - sn * cj
                    a[:, j] = sn * ci + c * cj
                    vi, vj = v[:, i].copy(), v[:, j].copy()
                    v[:, i] = c * vi - sn * vj
                    v[:, j] = sn * vi + c * vj
            fro2 = float((a * a).sum())
    w = np.diagonal(a).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v[:, order]


def sign_vertex_max(a: np.ndarray, q: float) -> tuple[float, np.ndarray]:
    """max over s in {-1,+1}^m of the l_q norm of A s, with an attaining s.

    Exhaustive enumeration; the returned vertex is canonicalized so its
    first coordinate is +1 (s and -s always tie).
    """
    a = np.asarray(a, dtype=float)
    k, m = a.shape
    if m > 24:
        raise ValueError("sign-vertex enumeration capped at 24 columns")
    best_val = -1.0
    best_s = np.ones(m)
    total = 1 << m
    chunk = 1 << 13
    shifts = np.arange(m, dtype=np.uint64)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.uint64)
        signs = (((idx[:, None] >> shifts[None, :]) & 1).astype(float)) * 2.0 - 1.0
        vals = lp_norm_rows(signs @ a.T, q)
        loc = int(np.argmax(vals))
        if vals[loc] > best_val:
            best_val = float(vals[loc])
            best_s = signs[loc].copy()
    if best_s[0] < 0:
        best_s = -best_s
    return best_val, best_s


def hopcroft_karp(
    indptr: np.ndarray, indices: np.ndarray, n_left: int, n_right: int
) -> tuple[int, np.ndarray, np.ndarray]:
    """Maximum-cardinality bipartite matching on a CSR adjacency.

    Returns (size, pair_left, pair_right) with -1 marking unmatched vertices.
    """
    indptr = np.asarray(indptr, dtype=np.int64)
    indices = np.asarray(indices, dtype=np.int64)
    pair_l = [-1] * n_left
    pair_r = [-1] * n_right
    inf = float("inf")
    dist = [inf] * n_left

    def bfs() -> bool:
        dq = deque()
        for u in range(n_left):
            if pair_l[u] == -1:
                dist[u] = 0.0
                dq.append(u)
            else:
                dist[u] = inf
        dist_free = inf
        while dq:
            u = dq.popleft()
            if dist[u] < dist_free:
                for e in range(indptr[u], indptr[u + 1]):
                    w = pair_r[indices[e]]
                    if w == -1:
                        dist_free = dist[u] + 1.0
                    elif dist[w] == inf:
                        dist[w] = dist[u] + 1.0
                        dq.append(w)
        return dist_free != inf

    def dfs(root: int, cur: list[int]) -> bool:
        stack = [root]
        vias: list[int] = []
        while stack:
            u = stack[-1]
            advanced = False
            while cur[u] < indptr[u + 1]:
                e = cur[u]
                cur[u] += 1
                vtx = int(indices[e])
                w = pair_r[vtx]
                if w == -1:
                    vias.append(vtx)
                    for uu, vv in zip(stack, vias):
                        pair_l[uu] = vv
                        pair_r[vv] = uu
                    return True
                if dist[w] == dist[u] + 1.0:
                    vias.append(vtx)
                    stack.append(w)
                    advanced = True
                    break
            if not advanced:
                dist[u] = inf
                stack.pop()
                if stack:
                    vias.pop()
        return False

    size = 0
    while bfs():
        cur = [int(x) for x in indptr[:-1]]
        for u in range(n_left):
            if pair_l[u] == -1 and dfs(u, cur):
                size += 1
    return size, np.asarray(pair_l, dtype=np.int64), np.asarray(pair_r, dtype=np.int64)


def dinic_maxflow(
    n_nodes: int,
    edge_u: np.ndarray,
    edge_v: np.ndarray,
    edge_cap: np.ndarray,
    s: int,
    t: int,
    cutoff: float = 1e-12,
) -> tuple[float, np.ndarray]:
    """Max flow with floating-point capacities; residuals <= cutoff are dead.

    Returns (flow value, per-input-edge net forward flow).
    """
    edge_u = np.asarray(edge_u, dtype=np.int64)
    edge_v = np.asarray(edge_v, dtype=np.int64)
    edge_cap = np.asarray(edge_cap, dtype=float)
    n_edges = len(edge_u)
    to = [0] * (2 * n_edges)
    cap = [0.0] * (2 * n_edges)
    head: list[list[int]] = [[] for _ in range(n_nodes)]
    for e in range(n_edges):
        to[2 * e] = int(edge_v[e])
        cap[2 * e] = float(edge_cap[e])
        to[2 * e + 1] = int(edge_u[e])
        head[int(edge_u[e])].append(2 * e)
        head[int(edge_v[e])].append(2 * e + 1)

    total = 0.0
    level = [-1] * n_nodes
    while True:
        for i in range(n_nodes):
            level[i] = -1
        level[s] = 0
        dq = deque([s])
        while dq:
            u = dq.popleft()
            for e in head[u]:
                w = to[e]
                if cap[e] > cutoff and level[w] < 0:
                    level[w] = level[u] + 1
                    dq.append(w)
        if level[t] < 0:
            break
        it = [0] * n_nodes
        while True:
            pushed = _dinic_augment(head, to, cap, level, it, s, t, cutoff)
            if pushed == 0.0:
                break
            total += pushed

    eflow = np.empty(n_edges)
    for e in range(n_edges):
        eflow[e] = min(max(float(edge_cap[e]) - cap[2 * e], 0.0), float(edge_cap[e]))
    return total, eflow


def _dinic_augment(head, to, cap, level, it, s, t, cutoff) -> float:
    path = [s]
    path_e: list[int] = []
    while path:
        u = path[-1]
        if u == t:
            bottleneck = min(cap[e] for e in path_e)
            for e in path_e:
                cap[e] -= bottleneck
                cap[e ^ 1] += bottleneck
            return bottleneck
        advanced = False
        while it[u] < len(head[u]):
            e = head[u][it[u]]
            if cap[e] > cutoff and level[to[e]] == level[u] + 1:
                path.append(to[e])
                path_e.append(e)
                advanced = True
                break
            it[u] += 1
        if not advanced:
            level[u] = -1
            path.pop()
            if path_e:
                path_e.pop()
            if path:
                it[path[-1]] += 1
    return 0.0
