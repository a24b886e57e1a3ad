"""Command-line front end.

Each subcommand parses flat inputs (CSV matrices/samples, JSON layer maps,
comma-separated vectors), dispatches to the library, and prints one JSON
report to standard output. Reports are deterministic: keys are sorted,
floats are printed with 17 significant digits, and non-finite floats become
the strings "inf"/"-inf"/"nan". Exit codes: 0 success, 1 computation error,
2 usage error.
"""

import argparse
import hashlib
import json
import math
import sys

import numpy as np

from . import bounds as bounds_mod
from . import dro as dro_mod
from .distortion import and_estimate, frobenius_certificate, ratio_certificate
from .fluctuation import Layer, VectorMap, fluctuation_certificate
from .lp_geometry import LpSpace, sample_lp, sigma2
from .matrix_spectral import AscentBudget, induced_norm
from .numerics import Grid1D
from .rng import SeededRng
from .transport import AttackModel, EmpiricalSample, ot_maxflow, strassen_enumerate, tv_eps_matching

SCHEMA = "specbound/1"


class UsageError(Exception):
    """Bad flag combination detected after argparse."""


# ---------------------------------------------------------------- emitter

def _emit(obj):
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return '"nan"'
        if math.isinf(x):
            return '"inf"' if x > 0 else '"-inf"'
        return format(x, ".17g")
    if isinstance(obj, dict):
        inner = ",".join(
            f"{json.dumps(str(k))}:{_emit(obj[k])}" for k in sorted(obj)
        )
        return "{" + inner + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        return "[" + ",".join(_emit(v) for v in list(obj)) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# ---------------------------------------------------------------- parsing

def _exponent(text):
    if text.strip().lower() == "inf":
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad exponent {text!r}") from None


def _float_list(text):
    try:
        vals = [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad number list {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty number list")
    return vals


def _load_matrix(path):
    return np.loadtxt(path, delimiter=",", ndmin=2, dtype=np.float64)


def _load_sample(path, weighted):
    arr = _load_matrix(path)
    if weighted:
        if arr.shape[1] < 2:
            raise ValueError(f"{path}: weighted samples need >= 2 columns")
        return EmpiricalSample(arr[:, :-1], arr[:, -1])
    return EmpiricalSample(arr)


def _load_vector_map(path):
    with open(path) as fh:
        doc = json.load(fh)
    layers = [
        Layer(
            np.asarray(spec["weights"], dtype=np.float64),
            np.asarray(spec["bias"], dtype=np.float64),
            spec.get("activation", "identity"),
        )
        for spec in doc["layers"]
    ]
    return VectorMap(tuple(layers))


def _parse_sweep(text):
    # --sweep eps=a:b:n
    key, _, rng = text.partition("=")
    if key.strip() != "eps":
        raise UsageError("only eps sweeps are supported (--sweep eps=a:b:n)")
    parts = rng.split(":")
    if len(parts) != 3:
        raise UsageError("sweep format is eps=a:b:n")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise UsageError("sweep format is eps=a:b:n") from None
    if count < 2:
        raise UsageError("sweep needs at least 2 points")
    return np.linspace(lo, hi, count)


_FILE_ARGS = {
    "opnorm": ("matrix",),
    "and-coeff": ("matrix",),
    "ratio-cert": ("matrix",),
    "fluctuation": ("vector_map", "point"),
    "tv-eps": ("a", "b"),
    "bounds": ("sigma_matrix", "sigma0", "theta"),
}


def _digest(command, args):
    items = {}
    file_args = set(_FILE_ARGS.get(command, ()))
    for key, val in vars(args).items():
        if key == "command" or val is None:
            continue
        if key in file_args:
            with open(val, "rb") as fh:
                items[key] = "sha256:" + hashlib.sha256(fh.read()).hexdigest()
        elif isinstance(val, (str, bool, int, float, list, tuple)):
            items[key] = val
        else:
            items[key] = str(val)
    payload = _emit({"command": command, "flags": items})
    return hashlib.sha256(payload.encode()).hexdigest()


# ------------------------------------------------------------ subcommands

def _cmd_sphere_sample(args):
    space = LpSpace(args.m, args.p)
    pts = sample_lp(space, args.surface, args.n, SeededRng(args.seed))
    results = {
        "m": args.m, "p": args.p, "n": args.n,
        "surface": args.surface, "points": pts,
    }
    return results, []


def _cmd_sigma2(args):
    var = sigma2(LpSpace(args.m, args.p))
    results = {
        "m": args.m, "p": args.p,
        "exact": var.exact, "asymptotic": var.asymptotic, "bound": var.bound,
    }
    return results, []


def _cmd_opnorm(args):
    a = _load_matrix(args.matrix)
    budget = AscentBudget(
        restarts=args.restarts, iterations=args.iterations,
        tol=args.tol, seed=args.ascent_seed,
    )
    res = induced_norm(a, args.p, args.q, budget=budget)
    warnings = []
    if res.kind == "lower_bound":
        warnings.append(
            "no exact route for this (p, q); value is an ascent lower bound"
        )
    results = {
        "value": res.value, "kind": res.kind, "witness": res.witness,
        "p": args.p, "q": args.q,
        "rows": a.shape[0], "cols": a.shape[1],
    }
    return results, warnings


def _cmd_and_coeff(args):
    a = _load_matrix(args.matrix)
    est = and_estimate(a, args.p, args.q, args.n, SeededRng(args.seed))
    cert = frobenius_certificate(a, args.p, args.q, estimate=est)
    results = {
        "value": est.value, "stderr": est.stderr, "n": est.n,
        "p": args.p, "q": args.q,
        "frobenius": {
            "bound": cert.bound, "constant": cert.constant,
            "verdict": cert.verdict, "slack_sigmas": cert.slack_sigmas,
        },
    }
    return results, []


def _cmd_ratio_cert(args):
    a = _load_matrix(args.matrix)
    cert = ratio_certificate(a, args.p, args.q, args.n, SeededRng(args.seed))
    warnings = []
    if cert.numerator_lower_bound:
        warnings.append(
            "numerator is an ascent lower bound; violations are inconclusive"
        )

    def pack(bc):
        return {
            "bound": bc.bound, "verdict": bc.verdict,
            "slack_sigmas": bc.slack_sigmas,
        }

    results = {
        "ratio_estimate": cert.ratio_estimate,
        "ratio_stderr": cert.ratio_stderr,
        "corrected_bound": cert.corrected_bound,
        "uncorrected_bound": cert.uncorrected_bound,
        "rank_relaxed_bound": cert.rank_relaxed_bound,
        "verdicts": {
            "corrected": pack(cert.corrected),
            "uncorrected": pack(cert.uncorrected),
            "rank_relaxed": pack(cert.rank_relaxed),
        },
        "numerator": {"value": cert.numerator.value, "kind": cert.numerator.kind},
        "denominator": {"value": cert.denominator.value,
                        "stderr": cert.denominator.stderr,
                        "n": cert.denominator.n},
        "p": args.p, "q": args.q,
    }
    return results, warnings


def _cmd_fluctuation(args):
    vm = _load_vector_map(args.vector_map)
    point = _load_matrix(args.point)
    if point.shape[0] != 1:
        raise ValueError("the base point file must contain exactly one row")
    report = fluctuation_certificate(
        vm, point[0], args.p, args.q, args.eps, args.n,
        SeededRng(args.seed), surface=args.surface,
    )
    results = {
        "eps": report.eps, "p": report.p, "q": report.q,
        "delta_max": report.delta_max, "method": report.method,
        "delta_avg": report.delta_avg,
        "delta_avg_stderr": report.delta_avg_stderr,
        "ratio": report.ratio, "ratio_stderr": report.ratio_stderr,
        "corrected_bound": report.corrected_bound,
        "rank_bound": report.rank_bound,
        "dimension_bound": report.dimension_bound,
        "surface": args.surface,
    }
    return results, []


def _cmd_tv_eps(args):
    s1 = _load_sample(args.a, args.weighted)
    s2 = _load_sample(args.b, args.weighted)
    attack = AttackModel.metric(args.p, args.eps)
    method = args.method
    if method == "auto":
        method = "matching" if (s1.is_uniform and s2.is_uniform) else "flow"
    if method == "enumerate":
        value = strassen_enumerate(s1, s2, attack)
        return {"value": value, "method": method, "eps": args.eps, "p": args.p}, []
    fn = tv_eps_matching if method == "matching" else ot_maxflow
    res = fn(s1, s2, attack)
    results = {
        "value": res.value, "matched_mass": res.matched_mass,
        "unmatched_left": list(res.unmatched_left),
        "unmatched_right": list(res.unmatched_right),
        "plan": [[i, j, mass] for (i, j, mass) in res.plan],
        "method": method, "eps": args.eps, "p": args.p,
    }
    return results, []


def _require(args, names, variant):
    missing = [n for n in names if getattr(args, n.replace("-", "_")) is None]
    if missing:
        flags = ", ".join("--" + n for n in missing)
        raise UsageError(f"dro --variant {variant} needs {flags}")


def _cmd_dro(args):
    variant = args.variant
    if variant == "linear-l1":
        _require(args, ["a", "c", "b"], variant)
        if len(args.a) != 1:
            raise UsageError("linear-l1 takes a scalar --a")
        sol = dro_mod.solve_linear_l1(args.a[0], args.c, args.b)
        extra = {}
    elif variant == "robust-ruin":
        _require(args, ["d", "eps"], variant)
        sol = dro_mod.solve_robust_ruin(args.d, args.eps)
        extra = {}
    else:
        _require(args, ["a", "b", "eps"], variant)
        sol = dro_mod.solve_robust_mean(args.a, args.b, args.eps)
        extra = {"excess": sol.value - float(np.mean(args.a))}
    results = {
        "variant": variant,
        "value": sol.value,
        "minimizer": sol.minimizer,
        "closed_form_value": sol.closed_form_value,
        "agrees": sol.agrees,
        **extra,
    }
    return results, []


def _bounds_evaluator(args, warnings):
    """Returns (evaluate(eps) -> value, static_results) for the kind."""
    kind = args.kind

    if kind == "gaussian":
        if args.delta is None:
            raise UsageError("bounds --kind gaussian needs --delta")
        if (args.sigma is None) == (args.sigma_matrix is None):
            raise UsageError("give exactly one of --sigma or --sigma-matrix")
        sigma = (np.asarray(args.sigma) if args.sigma is not None
                 else _load_matrix(args.sigma_matrix))
        pair = bounds_mod.GaussianPair(np.asarray(args.delta), sigma)
        def evaluate(eps):
            return bounds_mod.gaussian_err_bound(pair, eps)
        def extras(eps):
            res = bounds_mod.linf_deflation(pair, eps)
            return {"delta_eps": res.delta_eps, "exact": res.exact}
        return evaluate, extras

    if kind == "lighttail":
        if args.m is None or args.tail_sigma is None:
            raise UsageError("bounds --kind lighttail needs --m and --tail-sigma")
        m, sg = args.m, args.tail_sigma
        tail = lambda r: 2.0 * m * math.exp(-r * r / (2.0 * sg * sg))
        def evaluate(eps):
            return bounds_mod.lighttail_bound(tail, eps, args.mu_dist)
        return evaluate, None

    if kind == "moment":
        mf = _moment_fn(args)
        if args.alpha is None:
            raise UsageError("bounds --kind moment needs --alpha")
        def evaluate(eps):
            return bounds_mod.moment_bound(mf, args.alpha, eps, args.mu_dist)
        return evaluate, None

    if kind == "wasserstein":
        if args.w is None or args.p is None:
            raise UsageError("bounds --kind wasserstein needs --w and --p")
        def evaluate(eps):
            return bounds_mod.wasserstein_bound(args.w, args.p, eps)
        return evaluate, None

    if kind == "kingkong":
        mf = _moment_fn(args)
        if args.t is None or args.alpha is None or args.theta is None:
            raise UsageError("bounds --kind kingkong needs --t, --alpha, --theta")
        grid = _load_matrix(args.theta)
        if grid.shape[1] != 2:
            raise ValueError("theta grid must have two columns: r, theta(r)")
        theta = Grid1D(tuple(grid[:, 0]), tuple(grid[:, 1]))
        warnings.append("coordinate-approximation correction term omitted")
        value = bounds_mod.dobrushin_bound(
            args.t, mf, args.alpha, args.delta_means, theta
        )
        return None, {"value": value}

    if kind == "uap":
        mf = _moment_fn(args)
        if args.t is None or args.alpha is None or args.c is None:
            raise UsageError("bounds --kind uap needs --t, --alpha, --c")
        warnings.append("additive term of order 1/m omitted")
        value = bounds_mod.uap_bound(args.t, mf, args.alpha, args.c)
        return None, {"value": value}

    if kind == "noise-design":
        if args.sigma0 is None or args.r is None or args.sigma0_sq is None:
            raise UsageError(
                "bounds --kind noise-design needs --sigma0, --r, --sigma0-sq"
            )
        design = bounds_mod.noise_design(
            _load_matrix(args.sigma0), args.r, args.sigma0_sq,
            t=args.t, delta_means=args.delta_means,
        )
        return None, {
            "sigma_tilde": design.sigma_tilde,
            "alpha_star": design.alpha_star,
            "err_lower_bound": design.err_lower_bound,
        }

    if kind == "contraction":
        if args.m is None or args.p is None or args.diam is None:
            raise UsageError(
                "bounds --kind contraction needs --m, --p, --diam"
            )
        def evaluate(eps):
            return bounds_mod.contraction_constant(args.m, args.p, args.diam, eps)
        return evaluate, None

    raise UsageError(f"unknown bounds kind {kind!r}")


def _moment_fn(args):
    if args.moment_kind is None or args.moment_param is None:
        raise UsageError("this kind needs --moment-kind and --moment-param")
    return bounds_mod.MomentFunction(args.moment_kind, args.moment_param)


def _cmd_bounds(args):
    warnings = []
    out = _bounds_evaluator(args, warnings)
    results = {"kind": args.kind}

    if out[0] is None:  # single-shot kinds (no eps dependence)
        if args.sweep is not None:
            raise UsageError(f"--sweep is not supported for --kind {args.kind}")
        results.update(out[1])
        return results, warnings

    evaluate, extras = out
    if args.sweep is not None:
        eps_grid = _parse_sweep(args.sweep)
        results["sweep"] = {
            "eps": eps_grid,
            "value": [evaluate(float(e)) for e in eps_grid],
        }
        return results, warnings

    if args.eps is None:
        raise UsageError(f"bounds --kind {args.kind} needs --eps or --sweep")
    results["eps"] = args.eps
    results["value"] = evaluate(args.eps)
    if extras is not None:
        results.update(extras(args.eps))
    return results, warnings


# ----------------------------------------------------------------- parser

def _build_parser():
    top = argparse.ArgumentParser(
        prog="specbound",
        description="Spectral bounds relating adversarial and average-case "
                    "perturbation sensitivity.",
    )
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sphere-sample", help="draw uniform l_p sphere/ball points")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=_exponent, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--surface", choices=["sphere", "ball"], default="sphere")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("sigma2", help="coordinate variance on the l_p sphere")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=_exponent, required=True)

    p = sub.add_parser("opnorm", help="induced l_p -> l_q norm of a matrix")
    p.add_argument("--matrix", required=True)
    p.add_argument("--p", type=_exponent, required=True)
    p.add_argument("--q", type=_exponent, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--iterations", type=int, default=500)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--ascent-seed", type=int, default=0)

    p = sub.add_parser("and-coeff", help="average-case distortion estimate")
    p.add_argument("--matrix", required=True)
    p.add_argument("--p", type=_exponent, required=True)
    p.add_argument("--q", type=_exponent, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("ratio-cert", help="worst-to-average ratio certificate")
    p.add_argument("--matrix", required=True)
    p.add_argument("--p", type=_exponent, required=True)
    p.add_argument("--q", type=_exponent, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("fluctuation", help="local worst-vs-average fluctuation")
    p.add_argument("--map", dest="vector_map", required=True,
                   help="JSON layer map")
    p.add_argument("--point", required=True, help="CSV with one row")
    p.add_argument("--p", type=_exponent, required=True)
    p.add_argument("--q", type=_exponent, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--surface", choices=["sphere", "ball"], default="sphere")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("tv-eps", help="adversarial transport between samples")
    p.add_argument("--a", required=True, help="CSV sample, one point per row")
    p.add_argument("--b", required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--p", type=_exponent, default=2.0)
    p.add_argument("--weighted", action="store_true",
                   help="last CSV column is a weight")
    p.add_argument("--method",
                   choices=["auto", "matching", "flow", "enumerate"],
                   default="auto")

    p = sub.add_parser("dro", help="piecewise-linear robust minimizations")
    p.add_argument("--variant", required=True,
                   choices=["linear-l1", "robust-ruin", "robust-mean"])
    p.add_argument("--a", type=_float_list,
                   help="scalar (linear-l1) or sorted list (robust-mean)")
    p.add_argument("--c", type=_float_list, help="sorted list (linear-l1)")
    p.add_argument("--d", type=_float_list, help="sorted list (robust-ruin)")
    p.add_argument("--b", type=float)
    p.add_argument("--eps", type=float)

    p = sub.add_parser("bounds", help="closed-form robustness lower bounds")
    p.add_argument("--kind", required=True,
                   choices=["gaussian", "lighttail", "moment", "wasserstein",
                            "kingkong", "uap", "noise-design", "contraction"])
    p.add_argument("--eps", type=float)
    p.add_argument("--sweep", help="eps=a:b:n emits a curve")
    p.add_argument("--delta", type=_float_list)
    p.add_argument("--sigma", type=_float_list, help="diagonal variances")
    p.add_argument("--sigma-matrix", help="full covariance CSV")
    p.add_argument("--m", type=int)
    p.add_argument("--tail-sigma", type=float)
    p.add_argument("--mu-dist", type=float, default=0.0)
    p.add_argument("--moment-kind", choices=["power", "subgaussian"])
    p.add_argument("--moment-param", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--w", type=float)
    p.add_argument("--p", type=_exponent)
    p.add_argument("--t", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--delta-means", type=float, default=0.0)
    p.add_argument("--theta", help="CSV curve samples: r, theta(r)")
    p.add_argument("--sigma0", help="data covariance CSV")
    p.add_argument("--r", type=int)
    p.add_argument("--sigma0-sq", type=float)
    p.add_argument("--diam", type=float)

    return top


_RUNNERS = {
    "sphere-sample": _cmd_sphere_sample,
    "sigma2": _cmd_sigma2,
    "opnorm": _cmd_opnorm,
    "and-coeff": _cmd_and_coeff,
    "ratio-cert": _cmd_ratio_cert,
    "fluctuation": _cmd_fluctuation,
    "tv-eps": _cmd_tv_eps,
    "dro": _cmd_dro,
    "bounds": _cmd_bounds,
}


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        results, warnings = _RUNNERS[args.command](args)
        digest = _digest(args.command, args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, AssertionError, OSError,
            KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    report = {
        "schema": SCHEMA,
        "command": args.command,
        "inputs_digest": digest,
        "seed": getattr(args, "seed", None),
        "results": results,
        "warnings": warnings,
    }
    print(_emit(report))
    return 0


if __name__ == "__main__":
    sys.exit(main())
