"""Timing comparison of the compiled kernels against the NumPy fallback.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --repeats 9 --scale large

Each kernel is timed on seeded instances, so successive runs are
comparable. The reported number is the median wall time of the repeats;
the compiled column is omitted when the extension is not importable.
"""

import argparse
import statistics
import time

import numpy as np

from specbound._kernels import _fallback

try:
    from specbound._kernels import _core
except ImportError:
    _core = None


def _time(fn, repeats):
    samples = []
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - start)
    return statistics.median(samples)


def _bipartite_csr(gen, n1, n2, density):
    adj = gen.random((n1, n2)) < density
    indptr = np.zeros(n1 + 1, dtype=np.int64)
    indptr[1:] = adj.sum(axis=1).cumsum()
    indices = np.nonzero(adj)[1].astype(np.int64)
    return indptr, indices


def _flow_instance(gen, n1, n2, density):
    # source 0, left block, right block, sink last; unit-ish capacities
    adj = gen.random((n1, n2)) < density
    us, vs, caps = [], [], []
    for i in range(n1):
        us.append(0)
        vs.append(1 + i)
        caps.append(float(gen.uniform(0.5, 1.5)))
    for i, j in zip(*np.nonzero(adj)):
        us.append(1 + int(i))
        vs.append(1 + n1 + int(j))
        caps.append(float("inf"))
    for j in range(n2):
        us.append(1 + n1 + j)
        vs.append(1 + n1 + n2)
        caps.append(float(gen.uniform(0.5, 1.5)))
    return (
        n1 + n2 + 2,
        np.asarray(us, dtype=np.int64),
        np.asarray(vs, dtype=np.int64),
        np.asarray(caps, dtype=float),
        0,
        n1 + n2 + 1,
    )


def _cases(scale):
    gen = np.random.default_rng(2024)
    if scale == "small":
        n_eig, m_sign, n_match, n_flow = 24, 14, 150, 80
    else:
        n_eig, m_sign, n_match, n_flow = 60, 18, 500, 250
    sym = gen.standard_normal((n_eig, n_eig))
    sym = sym + sym.T
    rect = gen.standard_normal((10, m_sign))
    indptr, indices = _bipartite_csr(gen, n_match, n_match, 0.02)
    flow = _flow_instance(gen, n_flow, n_flow, 0.03)
    return [
        (f"jacobi_eigh ({n_eig}x{n_eig})",
         lambda impl: impl.jacobi_eigh(sym)),
        (f"sign_vertex_max (10x{m_sign}, q=3)",
         lambda impl: impl.sign_vertex_max(rect, 3.0)),
        (f"hopcroft_karp ({n_match}+{n_match}, 2% dense)",
         lambda impl: impl.hopcroft_karp(indptr, indices, n_match, n_match)),
        (f"dinic_maxflow ({n_flow}+{n_flow} bipartite)",
         lambda impl: impl.dinic_maxflow(*flow)),
    ]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=5)
    ap.add_argument("--scale", choices=["small", "large"], default="small")
    args = ap.parse_args()

    rows = []
    for label, call in _cases(args.scale):
        t_fb = _time(lambda: call(_fallback), args.repeats)
        if _core is not None:
            t_c = _time(lambda: call(_core), args.repeats)
            rows.append((label, t_fb, t_c, t_fb / t_c))
        else:
            rows.append((label, t_fb, None, None))

    width = max(len(r[0]) for r in rows)
    if _core is not None:
        print(f"{'kernel':<{width}}  {'fallback':>10}  {'compiled':>10}  {'speedup':>8}")
        for label, t_fb, t_c, ratio in rows:
            print(f"{label:<{width}}  {t_fb * 1e3:>8.2f}ms  {t_c * 1e3:>8.2f}ms  "
                  f"{ratio:>7.1f}x")
    else:
        print("compiled extension not importable; timing the fallback only")
        print(f"{'kernel':<{width}}  {'fallback':>10}")
        for label, t_fb, _, _ in rows:
            print(f"{label:<{width}}  {t_fb * 1e3:>8.2f}ms")


if __name__ == "__main__":
    main()
