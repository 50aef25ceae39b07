"""The multivariate t law t_p(mu, Sigma, nu) and its scaled chi-square mixing law.

Sampling uses the normal variance-mixture representation
``X = mu + L Z / sqrt(q)`` with ``L`` the lower Cholesky factor of ``Sigma``,
``Z`` standard normal and ``q ~ chi2_nu / nu`` independent of ``Z``.
Because ``Z`` is spherical, ``L Z`` has the same law as ``Sigma^{1/2} Z``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from os import PathLike
from typing import Any, Mapping

import numpy as np
from scipy import special

from ._gamma import log_gamma_ratio
from .exceptions import DimensionMismatch, InvalidParameters, MVTError, NonPositiveSupport
from .linalg import SPDFactor, as_square_matrix, as_vector, cholesky, mahalanobis_sq

__all__ = [
    "MVTParams",
    "RngStream",
    "ScaledChiSquare",
    "dump_params",
    "load_params",
    "log_pdf",
    "make_rng",
    "params_from_dict",
    "params_to_dict",
    "pdf",
    "sample",
    "sample_scaled_chisq",
    "scaled_chisq_log_pdf",
    "split_rng",
]

RngStream = np.random.Generator


def make_rng(seed: int | None = None) -> np.random.Generator:
    """Seeded PCG64 stream. The same seed always yields the same variates."""
    return np.random.default_rng(seed)


def split_rng(rng: np.random.Generator | int, k: int) -> list[np.random.Generator]:
    """Spawn ``k`` statistically independent child streams."""
    if not isinstance(rng, np.random.Generator):
        rng = make_rng(rng)
    return rng.spawn(k)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class MVTParams:
    """Location ``mu`` (length p), scale matrix ``sigma`` (p x p) and dof ``nu``.

    The Cholesky factor of ``sigma`` is computed once on construction, which
    also validates positive definiteness.
    """

    mu: np.ndarray
    sigma: np.ndarray
    nu: float
    factor: SPDFactor = field(init=False, repr=False)

    def __post_init__(self) -> None:
        mu = as_vector(self.mu, "mu")
        sigma = as_square_matrix(self.sigma, "sigma")
        if sigma.shape[0] != mu.size:
            raise DimensionMismatch(f"mu has length {mu.size} but sigma is {sigma.shape[0]}x{sigma.shape[1]}")
        nu = float(self.nu)
        if not (math.isfinite(nu) and nu > 0.0):
            raise InvalidParameters(f"nu must be finite and > 0, got {self.nu!r}")
        factor = cholesky(sigma)
        object.__setattr__(self, "mu", _readonly(mu))
        object.__setattr__(self, "sigma", _readonly(0.5 * (sigma + sigma.T)))
        object.__setattr__(self, "nu", nu)
        object.__setattr__(self, "factor", factor)

    @property
    def dim(self) -> int:
        return self.mu.size

    def log_pdf(self, x):
        return log_pdf(self, x)

    def pdf(self, x):
        return pdf(self, x)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return sample(self, n, rng)

    def mixing_law(self) -> "ScaledChiSquare":
        """Prior of the latent scale, ``chi2_nu / nu``."""
        return ScaledChiSquare(self.nu, self.nu)


@dataclass(frozen=True)
class ScaledChiSquare:
    """``W ~ chi2_b / c``: density proportional to ``w^(b/2-1) exp(-c w / 2)``.

    Equivalently a gamma law with shape ``b/2`` and rate ``c/2``.
    """

    b: float
    c: float

    def __post_init__(self) -> None:
        b, c = float(self.b), float(self.c)
        if not (math.isfinite(b) and b > 0.0 and math.isfinite(c) and c > 0.0):
            raise InvalidParameters(f"scaled chi-square needs b > 0 and c > 0, got b={self.b!r}, c={self.c!r}")
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def shape(self) -> float:
        return 0.5 * self.b

    @property
    def rate(self) -> float:
        return 0.5 * self.c

    def mean(self) -> float:
        return self.b / self.c

    def var(self) -> float:
        return 2.0 * self.b / self.c**2

    def cdf(self, w):
        return special.gammainc(self.shape, self.rate * np.maximum(w, 0.0))

    def ppf(self, prob):
        return special.gammaincinv(self.shape, prob) / self.rate

    def isf(self, prob):
        """Upper-tail quantile, accurate for tiny ``prob``."""
        return special.gammainccinv(self.shape, prob) / self.rate

    def log_pdf(self, w):
        return scaled_chisq_log_pdf(self, w)


def log_pdf(params: MVTParams, x):
    """Log density of t_p(mu, Sigma, nu) at ``x`` (shape ``(p,)`` or ``(n, p)``)."""
    x = np.asarray(x, dtype=float)
    p = params.dim
    if x.ndim not in (1, 2) or x.shape[-1] != p:
        raise DimensionMismatch(f"point has shape {x.shape}, distribution has dimension {p}")
    nu = params.nu
    half = 0.5 * (nu + p)
    const = (
        log_gamma_ratio(0.5 * nu, 0.5 * p)
        - 0.5 * p * math.log(nu * math.pi)
        - 0.5 * params.factor.log_det
    )
    d = mahalanobis_sq(x, params.mu, params.factor)
    out = const - half * np.log1p(d / nu)
    return float(out) if np.ndim(out) == 0 else out


def pdf(params: MVTParams, x):
    """Density at ``x``; equals ``exp(log_pdf)`` and underflows quietly to 0.

    When the gamma functions and determinant are representable the density is
    formed as a direct product, which avoids the ``|log f| * eps`` relative
    error of exponentiating the log density.
    """
    logf = log_pdf(params, x)
    nu, p = params.nu, params.dim
    half = 0.5 * (nu + p)
    root_det = float(np.prod(np.diag(params.factor.lower)))
    if half < 170.0 and math.isfinite(root_det) and root_det > 0.0:
        const = math.gamma(half) / math.gamma(0.5 * nu) / (nu * math.pi) ** (0.5 * p) / root_det
        d = mahalanobis_sq(np.asarray(x, dtype=float), params.mu, params.factor)
        with np.errstate(under="ignore"):
            direct = const * (1.0 + np.asarray(d) / nu) ** (-half)
        # keep exp(log_pdf) wherever the product under- or overflowed
        out = np.where(np.isfinite(direct) & (direct > 1e-300), direct, np.exp(logf))
        return float(out) if out.ndim == 0 else out
    return np.exp(logf) if np.ndim(logf) else math.exp(logf)


def scaled_chisq_log_pdf(s: ScaledChiSquare, w):
    """Normalized log density of ``chi2_b / c`` at ``w > 0``."""
    w_arr = np.asarray(w, dtype=float)
    if np.any(~(w_arr > 0.0)):
        raise NonPositiveSupport(f"scaled chi-square support is w > 0, got {w!r}")
    a = s.shape
    out = a * math.log(s.rate) - math.lgamma(a) + (a - 1.0) * np.log(w_arr) - s.rate * w_arr
    return float(out) if out.ndim == 0 else out


def sample_scaled_chisq(s: ScaledChiSquare, rng: np.random.Generator, size=None):
    """Draw from ``chi2_b / c`` as a gamma(shape b/2) variate divided by the rate c/2."""
    return rng.standard_gamma(s.shape, size) / s.rate


def sample(params: MVTParams, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` independent draws, returned as an ``(n, p)`` array.

    All ``n`` latent scales are drawn first, then the ``(n, p)`` normal block,
    so a given stream and ``n`` always reproduce the same array.
    """
    n = int(n)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    q = sample_scaled_chisq(params.mixing_law(), rng, n)
    z = rng.standard_normal((n, params.dim))
    y = z / np.sqrt(q)[:, None]
    return params.mu + y @ params.factor.lower.T


# -- JSON parameter documents -------------------------------------------------


def params_from_dict(doc: Mapping[str, Any]) -> MVTParams:
    """Build :class:`MVTParams` from ``{"mu": [...], "sigma": [[...]], "nu": float}``.

    Raises :class:`InvalidParameters` naming the first offending key.
    """
    if not isinstance(doc, Mapping):
        raise InvalidParameters("parameter document must be a JSON object")
    for key in ("mu", "sigma", "nu"):
        if key not in doc:
            raise InvalidParameters(f"missing key '{key}'")
    mu, sigma, nu = doc["mu"], doc["sigma"], doc["nu"]
    if not isinstance(mu, list) or not mu or not all(_is_real(v) for v in mu):
        raise InvalidParameters("'mu' must be a non-empty array of numbers")
    if (
        not isinstance(sigma, list)
        or len(sigma) != len(mu)
        or not all(isinstance(row, list) and len(row) == len(mu) for row in sigma)
    ):
        raise InvalidParameters(f"'sigma' must be a {len(mu)}x{len(mu)} array of arrays")
    if not all(_is_real(v) for row in sigma for v in row):
        raise InvalidParameters("'sigma' entries must be numbers")
    if not _is_real(nu) or not nu > 0 or not math.isfinite(nu):
        raise InvalidParameters("'nu' must be a finite number > 0")
    try:
        return MVTParams(np.array(mu, dtype=float), np.array(sigma, dtype=float), float(nu))
    except InvalidParameters:
        raise
    except MVTError as exc:
        raise InvalidParameters(f"'sigma': {exc}") from exc
    except ValueError as exc:
        raise InvalidParameters(f"'mu': {exc}") from exc


def _is_real(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def params_to_dict(params: MVTParams) -> dict[str, Any]:
    return {"mu": params.mu.tolist(), "sigma": params.sigma.tolist(), "nu": params.nu}


def load_params(path: str | PathLike) -> MVTParams:
    with open(path, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InvalidParameters(f"invalid JSON: {exc}") from exc
    return params_from_dict(doc)


def dump_params(params: MVTParams, path: str | PathLike) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(params_to_dict(params), fh, indent=2)
        fh.write("\n")
