"""Singular spectra and induced l_p -> l_q operator norms.

The spectrum is computed in-repo: eigenvalues of the smaller Gram matrix by
cyclic Jacobi rotations (via the kernel backend), square roots taken as
singular values. The Frobenius norm is accumulated straight from the entries
so it stays an independent cross-check on the spectrum.

Induced norms dispatch to an exact formula whenever one exists and otherwise
fall back to either sign-vertex enumeration (small m, p = inf) or a monotone
conditional-gradient ascent that yields a certified lower bound with a
witness vector.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import jacobi_eigh, sign_vertex_max
from .lp_geometry import check_exponent, lp_norm, lp_norm_rows, theta_exponent
from .rng import SeededRng

INF = math.inf


def _as_matrix(a):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError("expected a 2-D array")
    if a.shape[0] == 0 or a.shape[1] == 0:
        raise ValueError("matrix must have at least one row and one column")
    if not np.isfinite(a).all():
        raise ValueError("matrix entries must be finite")
    return a


def _conjugate(p):
    if p == 1.0:
        return INF
    if p == INF:
        return 1.0
    return p / (p - 1.0)


@dataclass(frozen=True)
class Spectrum:
    """Singular values in descending order plus derived summaries."""

    singular_values: np.ndarray
    frobenius: float
    rank: int

    @property
    def spectral(self):
        return float(self.singular_values[0])


def spectrum(a, rank_tol_factor=1e-12):
    """Full singular spectrum of ``a`` from the smaller Gram matrix.

    Numerical rank counts Gram eigenvalues above
    ``lambda_1 * max(k, m) * rank_tol_factor``. The cutoff lives on the
    eigenvalue scale because the Gram route only resolves singular values
    down to about ``sigma_1 * sqrt(eps)``; a cutoff on the singular-value
    scale would count that noise as rank.
    """
    a = _as_matrix(a)
    k, m = a.shape
    frobenius = float(np.sqrt((a * a).sum()))
    gram = a.T @ a if m <= k else a @ a.T
    eigvals, _ = jacobi_eigh(gram)
    eig = np.maximum(np.asarray(eigvals), 0.0)
    sv = np.sqrt(eig)
    cut = float(eig[0]) * max(k, m) * rank_tol_factor
    rank = int((eig > cut).sum())
    return Spectrum(singular_values=sv, frobenius=frobenius, rank=rank)


def _top_right_singular(a):
    # Right singular vector of the top singular value, unit 2-norm. The sign
    # is fixed so the largest-magnitude coordinate is positive.
    k, m = a.shape
    if m <= k:
        _, vecs = jacobi_eigh(a.T @ a)
        v = np.asarray(vecs)[:, 0].copy()
    else:
        _, vecs = jacobi_eigh(a @ a.T)
        u = np.asarray(vecs)[:, 0]
        v = a.T @ u
        nrm = math.sqrt(float((v * v).sum()))
        if nrm == 0.0:
            v = np.zeros(m)
            v[0] = 1.0
        else:
            v = v / nrm
    j = int(np.argmax(np.abs(v)))
    if v[j] < 0.0:
        v = -v
    return v


def _holder_extremal(v, p):
    """Unit l_p vector x maximizing <v, x>; attains the conjugate norm of v.

    Zero coordinates take the + sign; a zero vector maps to the first basis
    vector.
    """
    v = np.asarray(v, dtype=np.float64)
    mag = np.abs(v)
    top = float(mag.max(initial=0.0))
    if top == 0.0:
        x = np.zeros(v.shape[0])
        x[0] = 1.0
        return x
    sgn = np.where(v >= 0.0, 1.0, -1.0)
    if p == 1.0:
        x = np.zeros(v.shape[0])
        j = int(np.argmax(mag))
        x[j] = sgn[j]
        return x
    if p == INF:
        return sgn
    # x_j proportional to |v_j|^(p*-1); scale by the max first so the power
    # stays in [0, 1] even when p is close to 1.
    x = sgn * (mag / top) ** (_conjugate(p) - 1.0)
    return x / lp_norm(x, p)


def _dual_vector(y, q):
    # Norming functional of y in l_q: unit conjugate norm, pairs to |y|_q.
    return _holder_extremal(y, _conjugate(q))


@dataclass(frozen=True)
class AscentBudget:
    """Restart/iteration budget for the conditional-gradient ascent."""

    restarts: int = 20
    iterations: int = 500
    tol: float = 1e-10
    seed: int = 0


@dataclass(frozen=True)
class InducedNormResult:
    value: float
    kind: str  # "exact" | "brute" | "lower_bound"
    witness: np.ndarray = field(repr=False)


def _ascent_lower_bound(a, p, q, budget):
    # Maximize |A x|_q over the unit l_p ball. Each step linearizes at x and
    # jumps to the extremal point of the linearization, so the value never
    # decreases; with restarts this is a strong (but uncertified) lower bound.
    k, m = a.shape
    gen = SeededRng(budget.seed).generator()
    best_val = -1.0
    best_x = None
    for restart in range(budget.restarts):
        if restart == 0:
            x = _top_right_singular(a)
            nrm = lp_norm(x, p)
            x = x / nrm if nrm > 0.0 else _holder_extremal(np.ones(m), p)
        else:
            x = gen.standard_normal(m)
            nrm = lp_norm(x, p)
            if nrm == 0.0:
                continue
            x = x / nrm
        val = lp_norm(a @ x, p=q)
        for _ in range(budget.iterations):
            grad = a.T @ _dual_vector(a @ x, q)
            x_next = _holder_extremal(grad, p)
            val_next = lp_norm(a @ x_next, p=q)
            if val_next - val <= budget.tol * max(1.0, val):
                if val_next > val:
                    x, val = x_next, val_next
                break
            x, val = x_next, val_next
        if val > best_val:
            best_val = val
            best_x = x
    return float(best_val), best_x


def induced_norm(a, p, q, budget=None):
    """Induced l_p -> l_q norm of ``a`` with an attaining witness.

    Exact cases: p = 1 (max column q-norm), q = inf (max row conjugate
    norm), p = q = 2 (top singular value). For p = inf with at most 20
    columns the sign vertices are enumerated (kind "brute"). Everything
    else runs the ascent and reports kind "lower_bound".
    """
    a = _as_matrix(a)
    check_exponent(p)
    check_exponent(q)
    k, m = a.shape
    if p == 1.0:
        col_norms = lp_norm_rows(a.T, q)
        j = int(np.argmax(col_norms))
        witness = np.zeros(m)
        witness[j] = 1.0
        return InducedNormResult(float(col_norms[j]), "exact", witness)
    if q == INF:
        row_norms = lp_norm_rows(a, _conjugate(p))
        i = int(np.argmax(row_norms))
        witness = _holder_extremal(a[i], p)
        return InducedNormResult(float(row_norms[i]), "exact", witness)
    if p == 2.0 and q == 2.0:
        spec = spectrum(a)
        return InducedNormResult(spec.spectral, "exact", _top_right_singular(a))
    if p == INF and m <= 20:
        value, witness = sign_vertex_max(a, q)
        return InducedNormResult(float(value), "brute", np.asarray(witness))
    if budget is None:
        budget = AscentBudget()
    value, witness = _ascent_lower_bound(a, p, q, budget)
    return InducedNormResult(value, "lower_bound", witness)


def spectral_floor(k, m, p, q, sigma1):
    """Lower bound on the induced l_p -> l_q norm in terms of sigma_1."""
    check_exponent(p)
    check_exponent(q)
    return k ** (-theta_exponent(2.0, q)) * m ** (-theta_exponent(p, 2.0)) * sigma1
