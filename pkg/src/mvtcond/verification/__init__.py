"""Independent numeric oracles: latent-scale quadrature, t CDF, KS and Monte Carlo checks."""

from .gof import GofReport, independence_check, ks_2samp, ks_statistic, majority, moment_suite
from .quadrature import QuadratureSpec, conditional_pdf_quadrature, integrate, normal_scale_mixture_pdf
from .special import betainc, student_t_cdf

__all__ = [
    "GofReport",
    "QuadratureSpec",
    "betainc",
    "conditional_pdf_quadrature",
    "independence_check",
    "integrate",
    "ks_2samp",
    "ks_statistic",
    "majority",
    "moment_suite",
    "normal_scale_mixture_pdf",
    "student_t_cdf",
]
