# Compiled twins of the fallback kernels. Same algorithms, same outputs;
# only the loop bodies are lowered to C. Keep the two files in sync.

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, fabs, isinf, pow, sqrt

cnp.import_array()


def jacobi_eigh(s, int max_sweeps=60):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations."""
    a_arr = np.array(s, dtype=np.float64, order="C")
    if a_arr.ndim != 2 or a_arr.shape[0] != a_arr.shape[1]:
        raise ValueError("jacobi_eigh expects a square matrix")
    cdef Py_ssize_t n = a_arr.shape[0]
    v_arr = np.eye(n)
    cdef double[:, ::1] a = a_arr
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t i, j, r, sweep
    cdef double fro2, off2, prev_off2, thresh, apq, tau, t, c, sn, x, y

    if n > 1:
        fro2 = 0.0
        for i in range(n):
            for j in range(n):
                fro2 += a[i, j] * a[i, j]
        prev_off2 = INFINITY
        for sweep in range(max_sweeps):
            # summed directly: the fro2-minus-diagonal form cancels
            # catastrophically near convergence and can stall sweeps while
            # off-diagonal entries are still ~1e-8
            off2 = 0.0
            for i in range(n):
                for j in range(n):
                    if i != j:
                        off2 += a[i, j] * a[i, j]
            if off2 <= 1e-30 * fro2 or off2 >= prev_off2:
                break
            prev_off2 = off2
            thresh = 0.2 * sqrt(off2) / n if sweep < 4 else 0.0
            for i in range(n - 1):
                for j in range(i + 1, n):
                    apq = a[i, j]
                    if apq == 0.0 or fabs(apq) <= thresh:
                        continue
                    tau = (a[j, j] - a[i, i]) / (2.0 * apq)
                    if tau >= 0.0:
                        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    sn = t * c
                    for r in range(n):
                        x = a[i, r]
                        y = a[j, r]
                        a[i, r] = c * x - sn * y
                        a[j, r] = sn * x + c * y
                    for r in range(n):
                        x = a[r, i]
                        y = a[r, j]
                        a[r, i] = c * x - sn * y
                        a[r, j] = sn * x + c * y
                    for r in range(n):
                        x = v[r, i]
                        y = v[r, j]
                        v[r, i] = c * x - sn * y
                        v[r, j] = sn * x + c * y
            fro2 = 0.0
            for i in range(n):
                for j in range(n):
                    fro2 += a[i, j] * a[i, j]

    w = np.diagonal(a_arr).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], v_arr[:, order]


cdef double _qnorm(double[::1] y, Py_ssize_t k, double q):
    cdef Py_ssize_t i
    cdef double acc = 0.0, vmax = 0.0, r
    if isinf(q):
        for i in range(k):
            r = fabs(y[i])
            if r > vmax:
                vmax = r
        return vmax
    if q == 1.0:
        for i in range(k):
            acc += fabs(y[i])
        return acc
    if q == 2.0:
        for i in range(k):
            acc += y[i] * y[i]
        return sqrt(acc)
    for i in range(k):
        r = fabs(y[i])
        if r > vmax:
            vmax = r
    if vmax == 0.0:
        return 0.0
    for i in range(k):
        acc += pow(fabs(y[i]) / vmax, q)
    return vmax * pow(acc, 1.0 / q)


def sign_vertex_max(a, double q):
    """max over s in {-1,+1}^m of the l_q norm of A s, with an attaining s.

    Gray-code walk: one column update and one norm per vertex. The returned
    vertex is canonicalized so its first coordinate is +1.
    """
    a_arr = np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t k = a_arr.shape[0]
    cdef Py_ssize_t m = a_arr.shape[1]
    if m > 24:
        raise ValueError("sign-vertex enumeration capped at 24 columns")
    cdef double[:, ::1] amat = a_arr
    y_arr = a_arr.sum(axis=1)  # A s for the all-ones start vertex
    s_arr = np.ones(m)
    best_arr = s_arr.copy()
    cdef double[::1] y = y_arr
    cdef double[::1] sv = s_arr
    cdef double[::1] best = best_arr
    cdef unsigned long long total = (<unsigned long long> 1) << m
    cdef unsigned long long i, bits
    cdef Py_ssize_t j, r
    cdef double best_val = _qnorm(y, k, q)
    cdef double val, step

    for i in range(1, total):
        bits = i
        j = 0
        while not (bits & 1):
            bits >>= 1
            j += 1
        sv[j] = -sv[j]
        step = 2.0 * sv[j]
        for r in range(k):
            y[r] += step * amat[r, j]
        val = _qnorm(y, k, q)
        if val > best_val:
            best_val = val
            for r in range(m):
                best[r] = sv[r]
    if best[0] < 0:
        for r in range(m):
            best[r] = -best[r]
    return best_val, best_arr


def hopcroft_karp(indptr, indices, int n_left, int n_right):
    """Maximum-cardinality bipartite matching on a CSR adjacency."""
    cdef cnp.int64_t[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef cnp.int64_t[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    pair_l_arr = np.full(n_left, -1, dtype=np.int64)
    pair_r_arr = np.full(n_right, -1, dtype=np.int64)
    cdef cnp.int64_t[::1] pair_l = pair_l_arr
    cdef cnp.int64_t[::1] pair_r = pair_r_arr
    cdef cnp.int64_t INF = (<cnp.int64_t> 1) << 62
    dist_arr = np.zeros(n_left, dtype=np.int64)
    queue_arr = np.zeros(max(n_left, 1), dtype=np.int64)
    stack_arr = np.zeros(n_left + 1, dtype=np.int64)
    vias_arr = np.zeros(n_left + 1, dtype=np.int64)
    cur_arr = np.zeros(max(n_left, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] dist = dist_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef cnp.int64_t[::1] stack = stack_arr
    cdef cnp.int64_t[::1] vias = vias_arr
    cdef cnp.int64_t[::1] cur = cur_arr
    cdef int size = 0
    cdef Py_ssize_t u, head, tail, e, vtx, w, depth, root, kk
    cdef cnp.int64_t dist_free
    cdef bint advanced, found

    while True:
        # BFS phase: layer the free left vertices.
        head = tail = 0
        for u in range(n_left):
            if pair_l[u] == -1:
                dist[u] = 0
                queue[tail] = u
                tail += 1
            else:
                dist[u] = INF
        dist_free = INF
        while head < tail:
            u = queue[head]
            head += 1
            if dist[u] < dist_free:
                for e in range(ptr[u], ptr[u + 1]):
                    w = pair_r[idx[e]]
                    if w == -1:
                        dist_free = dist[u] + 1
                    elif dist[w] == INF:
                        dist[w] = dist[u] + 1
                        queue[tail] = w
                        tail += 1
        if dist_free == INF:
            break
        # DFS phase: vertex-disjoint augmenting paths along the layers.
        for u in range(n_left):
            cur[u] = ptr[u]
        for root in range(n_left):
            if pair_l[root] != -1:
                continue
            depth = 0
            stack[0] = root
            while depth >= 0:
                u = stack[depth]
                advanced = False
                found = False
                while cur[u] < ptr[u + 1]:
                    e = cur[u]
                    cur[u] += 1
                    vtx = idx[e]
                    w = pair_r[vtx]
                    if w == -1:
                        vias[depth] = vtx
                        for kk in range(depth + 1):
                            pair_l[stack[kk]] = vias[kk]
                            pair_r[vias[kk]] = stack[kk]
                        size += 1
                        found = True
                        break
                    if dist[w] == dist[u] + 1:
                        vias[depth] = vtx
                        depth += 1
                        stack[depth] = w
                        advanced = True
                        break
                if found:
                    break
                if not advanced:
                    dist[u] = INF
                    depth -= 1
    return size, pair_l_arr, pair_r_arr


def dinic_maxflow(int n_nodes, edge_u, edge_v, edge_cap, int s, int t,
                  double cutoff=1e-12):
    """Max flow with floating-point capacities; residuals <= cutoff are dead."""
    cdef cnp.int64_t[::1] eu = np.ascontiguousarray(edge_u, dtype=np.int64)
    cdef cnp.int64_t[::1] ev = np.ascontiguousarray(edge_v, dtype=np.int64)
    cdef double[::1] ec = np.ascontiguousarray(edge_cap, dtype=np.float64)
    cdef Py_ssize_t n_edges = eu.shape[0]
    cdef Py_ssize_t n_arcs = 2 * n_edges

    to_arr = np.zeros(max(n_arcs, 1), dtype=np.int64)
    cap_arr = np.zeros(max(n_arcs, 1))
    deg_arr = np.zeros(n_nodes + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] to = to_arr
    cdef double[::1] cap = cap_arr
    cdef cnp.int64_t[::1] hptr = deg_arr
    cdef Py_ssize_t e, u, w
    for e in range(n_edges):
        hptr[eu[e] + 1] += 1
        hptr[ev[e] + 1] += 1
    for u in range(n_nodes):
        hptr[u + 1] += hptr[u]
    fill_arr = np.asarray(deg_arr[:-1]).copy()
    hidx_arr = np.zeros(max(n_arcs, 1), dtype=np.int64)
    cdef cnp.int64_t[::1] fill = fill_arr
    cdef cnp.int64_t[::1] hidx = hidx_arr
    for e in range(n_edges):
        to[2 * e] = ev[e]
        cap[2 * e] = ec[e]
        to[2 * e + 1] = eu[e]
        cap[2 * e + 1] = 0.0
        hidx[fill[eu[e]]] = 2 * e
        fill[eu[e]] += 1
        hidx[fill[ev[e]]] = 2 * e + 1
        fill[ev[e]] += 1

    level_arr = np.zeros(n_nodes, dtype=np.int64)
    queue_arr = np.zeros(n_nodes, dtype=np.int64)
    it_arr = np.zeros(n_nodes, dtype=np.int64)
    path_arr = np.zeros(n_nodes + 1, dtype=np.int64)
    path_e_arr = np.zeros(n_nodes + 1, dtype=np.int64)
    cdef cnp.int64_t[::1] level = level_arr
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef cnp.int64_t[::1] it = it_arr
    cdef cnp.int64_t[::1] path = path_arr
    cdef cnp.int64_t[::1] path_e = path_e_arr
    cdef double total = 0.0, bottleneck
    cdef Py_ssize_t head, tail, depth, kk
    cdef bint advanced

    while True:
        for u in range(n_nodes):
            level[u] = -1
        level[s] = 0
        queue[0] = s
        head = 0
        tail = 1
        while head < tail:
            u = queue[head]
            head += 1
            for e in range(hptr[u], hptr[u + 1]):
                w = to[hidx[e]]
                if cap[hidx[e]] > cutoff and level[w] < 0:
                    level[w] = level[u] + 1
                    queue[tail] = w
                    tail += 1
        if level[t] < 0:
            break
        for u in range(n_nodes):
            it[u] = hptr[u]
        while True:
            # One augmenting path in the level graph, cursor-based DFS.
            depth = 0
            path[0] = s
            bottleneck = 0.0
            while depth >= 0:
                u = path[depth]
                if u == t:
                    bottleneck = cap[path_e[0]]
                    for kk in range(1, depth):
                        e = path_e[kk]
                        if cap[e] < bottleneck:
                            bottleneck = cap[e]
                    for kk in range(depth):
                        e = path_e[kk]
                        cap[e] -= bottleneck
                        cap[e ^ 1] += bottleneck
                    break
                advanced = False
                while it[u] < hptr[u + 1]:
                    e = hidx[it[u]]
                    if cap[e] > cutoff and level[to[e]] == level[u] + 1:
                        depth += 1
                        path[depth] = to[e]
                        path_e[depth - 1] = e
                        advanced = True
                        break
                    it[u] += 1
                if not advanced:
                    level[u] = -1
                    depth -= 1
                    if depth >= 0:
                        it[path[depth]] += 1
            if depth < 0 or bottleneck == 0.0:
                break
            total += bottleneck

    eflow_arr = np.zeros(max(n_edges, 1))
    cdef double[::1] eflow = eflow_arr
    cdef double net
    for e in range(n_edges):
        net = ec[e] - cap[2 * e]
        if net < 0.0:
            net = 0.0
        elif net > ec[e]:
            net = ec[e]
        eflow[e] = net
    return total, eflow_arr[:n_edges]
