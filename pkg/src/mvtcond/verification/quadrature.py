"""Quadrature oracle for the conditional density.

The conditional density of the free block is written as an integral over
the latent scale ``q``::

    f(x2 | x1) = int N(x2; mu_2|1, S22|1 / q) * g(q | x1) dq

with ``g`` the scaled chi-square posterior of ``q``. Nothing here uses the
closed-form t conditional; the two are compared in the tests.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..distribution import MVTParams, ScaledChiSquare
from ..exceptions import DimensionMismatch, QuadratureNonConvergence
from ..linalg import Partition

__all__ = [
    "QuadratureSpec",
    "conditional_pdf_quadrature",
    "gauss_kronrod",
    "integrate",
    "normal_scale_mixture_pdf",
]

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15),
# abscissae in decreasing order with the centre last.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
# Gauss weights for abscissae _XGK[1], _XGK[3], _XGK[5], _XGK[7].
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])  # 15 nodes, ascending
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[[13, 11, 9]] = _WG[:3]
_GW[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    truncation_mass: float = 1e-12
    max_panels: int = 10_000

    def __post_init__(self) -> None:
        for name in ("rel_tol", "abs_tol", "truncation_mass"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {v!r}")
        if self.max_panels < 1:
            raise ValueError("max_panels must be positive")


def gauss_kronrod(f: Callable[[np.ndarray], np.ndarray], a: float, b: float) -> tuple[float, float]:
    """One G7-K15 panel on ``[a, b]``: returns ``(kronrod_estimate, |kronrod - gauss|)``."""
    half = 0.5 * (b - a)
    fx = np.asarray(f(0.5 * (a + b) + half * _NODES), dtype=float)
    k = half * float(_KW @ fx)
    g = half * float(_GW @ fx)
    return k, abs(k - g)


def integrate(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    rel_tol: float = 1e-9,
    abs_tol: float = 1e-12,
    max_panels: int = 10_000,
    breakpoints: Sequence[float] = (),
) -> tuple[float, float]:
    """Globally adaptive G7-K15 quadrature of a vectorized ``f`` over ``[a, b]``.

    The panel with the largest error estimate is halved until the summed
    error is below ``max(abs_tol, rel_tol * |integral|)``.

    Returns
    -------
    value, error_estimate

    Raises
    ------
    QuadratureNonConvergence
        When ``max_panels`` panels are in use and the tolerance is still unmet.
    """
    edges = sorted({float(a), float(b), *(float(p) for p in breakpoints if a < p < b)})
    heap: list[tuple[float, float, float, float]] = []
    total = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = gauss_kronrod(f, lo, hi)
        heapq.heappush(heap, (-e, lo, hi, val))
        total += val
        err += e
    while err > max(abs_tol, rel_tol * abs(total)):
        if len(heap) >= max_panels:
            raise QuadratureNonConvergence(
                f"error estimate {err:.3g} above tolerance after {len(heap)} panels"
            )
        neg_e, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = gauss_kronrod(f, lo, mid)
        v2, e2 = gauss_kronrod(f, mid, hi)
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        total += v1 + v2 - val
        err += e1 + e2 + neg_e
    # re-sum to shed accumulated update round-off
    return math.fsum(item[3] for item in heap), math.fsum(-item[0] for item in heap)


def normal_scale_mixture_pdf(
    quad_form: float,
    log_det: float,
    dim: int,
    mixing: ScaledChiSquare,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """``int N_dim(r; 0, S / q) mixing(q) dq`` for a point at Mahalanobis distance ``quad_form``.

    Integrates in ``log q`` between the ``truncation_mass`` and
    ``1 - truncation_mass`` quantiles of ``mixing``, widened when necessary
    to cover the same quantiles of the integrand's own mass in ``q``.
    """
    a, rate = mixing.shape, mixing.rate
    tm = spec.truncation_mass
    lo, hi = float(mixing.ppf(tm)), float(mixing.isf(tm))
    # integrand in q is proportional to a gamma kernel with these parameters
    tilted = ScaledChiSquare(2.0 * a + dim, 2.0 * rate + quad_form)
    lo = min(lo, float(tilted.ppf(tm)))
    hi = max(hi, float(tilted.isf(tm)))
    if not (0.0 < lo < hi and math.isfinite(hi)):
        raise QuadratureNonConvergence(f"degenerate integration range [{lo}, {hi}]")

    log_const = (
        -0.5 * dim * math.log(2.0 * math.pi) - 0.5 * log_det
        + a * math.log(rate) - math.lgamma(a)
    )

    def log_integrand(u):
        q = np.exp(u)
        # normal kernel * mixing density * Jacobian dq = q du
        return log_const + (0.5 * dim + a) * u - q * (0.5 * quad_form + rate)

    mode = math.log((0.5 * dim + a) / (0.5 * quad_form + rate))
    ref = float(log_integrand(np.clip(mode, math.log(lo), math.log(hi))))
    value, _ = integrate(
        lambda u: np.exp(log_integrand(u) - ref),
        math.log(lo),
        math.log(hi),
        rel_tol=spec.rel_tol,
        abs_tol=spec.abs_tol,
        max_panels=spec.max_panels,
        breakpoints=(mode,),
    )
    return value * math.exp(ref)


def conditional_pdf_quadrature(
    params: MVTParams,
    part: Partition | Sequence[int],
    x1,
    x2,
    spec: QuadratureSpec = QuadratureSpec(),
) -> float:
    """Conditional density of ``x2`` given ``x1`` by integrating out the latent scale."""
    part = part if isinstance(part, Partition) else Partition.from_observed(part, params.dim)
    part.check(params.dim)
    x1 = np.atleast_1d(np.asarray(x1, dtype=float))
    x2 = np.atleast_1d(np.asarray(x2, dtype=float))
    if x1.shape != (part.p1,) or x2.shape != (part.p2,) or part.p2 == 0:
        raise DimensionMismatch(
            f"x1 {x1.shape} / x2 {x2.shape} do not match blocks of sizes {part.p1} / {part.p2}"
        )
    # Gaussian conditional given (x1, q), via dense solves rather than the
    # factor-based path used by the closed form
    i1, i2 = list(part.block1), list(part.block2)
    s11, s21, s22 = part.blocks(params.sigma)
    if part.p1:
        gain = np.linalg.solve(s11, s21.T).T
        diff1 = x1 - params.mu[i1]
        d1 = float(diff1 @ np.linalg.solve(s11, diff1))
        location = params.mu[i2] + gain @ diff1
        base_scale = s22 - gain @ s21.T
    else:
        d1, location, base_scale = 0.0, params.mu[i2], s22
    r = x2 - location
    quad_form = float(r @ np.linalg.solve(base_scale, r))
    _, log_det = np.linalg.slogdet(base_scale)
    posterior = ScaledChiSquare(params.nu + part.p1, params.nu + d1)
    return normal_scale_mixture_pdf(quad_form, float(log_det), part.p2, posterior, spec)
