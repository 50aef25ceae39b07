"""Multivariate Student-t density, sampling, marginals and closed-form conditionals."""

from .conditioning import (
    ConditionalSpec,
    condition,
    conditional_sample_augmented,
    independence_residual,
    marginal,
    q_posterior,
    regression_location,
    unnormalized_conditional_logpdf,
)
from .distribution import (
    MVTParams,
    ScaledChiSquare,
    load_params,
    log_pdf,
    make_rng,
    params_from_dict,
    params_to_dict,
    pdf,
    sample,
    sample_scaled_chisq,
    scaled_chisq_log_pdf,
    split_rng,
)
from .linalg import Partition, SPDFactor, cholesky, mahalanobis_sq, schur_complement, solve_spd

__version__ = "0.1.0"

__all__ = [
    "ConditionalSpec",
    "MVTParams",
    "Partition",
    "SPDFactor",
    "ScaledChiSquare",
    "cholesky",
    "condition",
    "conditional_sample_augmented",
    "independence_residual",
    "load_params",
    "log_pdf",
    "mahalanobis_sq",
    "make_rng",
    "marginal",
    "params_from_dict",
    "params_to_dict",
    "pdf",
    "q_posterior",
    "regression_location",
    "sample",
    "sample_scaled_chisq",
    "scaled_chisq_log_pdf",
    "schur_complement",
    "solve_spd",
    "split_rng",
    "unnormalized_conditional_logpdf",
]
