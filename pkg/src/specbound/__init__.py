"""specbound: spectral bounds linking adversarial and average-case
perturbation sensitivity, with empirical certification tools."""

from ._kernels import backend_name
from .bounds import (
    DeflationResult,
    GaussianPair,
    MomentFunction,
    NoiseDesign,
    contraction_constant,
    dobrushin_bound,
    gaussian_err_bound,
    gaussian_tv,
    lighttail_bound,
    linf_deflation,
    moment_bound,
    noise_design,
    uap_bound,
    wasserstein_bound,
)
from .distortion import (
    AndEstimate,
    BoundCertificate,
    RatioCertificate,
    and_estimate,
    and_estimate_multi,
    frobenius_certificate,
    frobenius_constant,
    ratio_certificate,
)
from .dro import (
    LinearL1Instance,
    PwlSolution,
    RobustMeanInstance,
    RobustRuinInstance,
    breakpoint_oracle,
    solve_linear_l1,
    solve_robust_mean,
    solve_robust_ruin,
)
from .fluctuation import (
    FluctuationReport,
    Layer,
    VectorMap,
    eval_map,
    eval_map_batch,
    fluctuation_certificate,
    jacobian_analytic,
    jacobian_fd,
)
from .lp_geometry import (
    LpSpace,
    SphereVariance,
    lp_norm,
    norm_equiv_bounds,
    sample_lp,
    sigma2,
    theta_exponent,
)
from .matrix_spectral import (
    AscentBudget,
    InducedNormResult,
    Spectrum,
    induced_norm,
    spectral_floor,
    spectrum,
)
from .numerics import (
    ConcaveEnvelope,
    Grid1D,
    concave_envelope,
    log_gamma,
    reg_inc_beta,
    std_normal_cdf,
)
from .rng import SeededRng, draw_batched, thread_count
from .transport import (
    AttackModel,
    EmpiricalSample,
    TransportResult,
    ot_maxflow,
    strassen_enumerate,
    tv_eps_matching,
)

__version__ = "0.1.0"

__all__ = [
    "AndEstimate",
    "AscentBudget",
    "AttackModel",
    "BoundCertificate",
    "ConcaveEnvelope",
    "DeflationResult",
    "EmpiricalSample",
    "FluctuationReport",
    "GaussianPair",
    "Grid1D",
    "InducedNormResult",
    "Layer",
    "LinearL1Instance",
    "LpSpace",
    "MomentFunction",
    "NoiseDesign",
    "PwlSolution",
    "RatioCertificate",
    "RobustMeanInstance",
    "RobustRuinInstance",
    "SeededRng",
    "SphereVariance",
    "Spectrum",
    "TransportResult",
    "VectorMap",
    "and_estimate",
    "and_estimate_multi",
    "backend_name",
    "breakpoint_oracle",
    "concave_envelope",
    "contraction_constant",
    "dobrushin_bound",
    "draw_batched",
    "eval_map",
    "eval_map_batch",
    "fluctuation_certificate",
    "frobenius_certificate",
    "frobenius_constant",
    "gaussian_err_bound",
    "gaussian_tv",
    "induced_norm",
    "jacobian_analytic",
    "jacobian_fd",
    "lighttail_bound",
    "linf_deflation",
    "log_gamma",
    "lp_norm",
    "moment_bound",
    "noise_design",
    "norm_equiv_bounds",
    "ot_maxflow",
    "ratio_certificate",
    "reg_inc_beta",
    "sample_lp",
    "sigma2",
    "solve_linear_l1",
    "solve_robust_mean",
    "solve_robust_ruin",
    "spectral_floor",
    "spectrum",
    "std_normal_cdf",
    "strassen_enumerate",
    "theta_exponent",
    "thread_count",
    "tv_eps_matching",
    "uap_bound",
    "wasserstein_bound",
]
