"""Regularized incomplete beta function and the univariate Student-t CDF."""

from __future__ import annotations

import math

import numpy as np

from .._gamma import log_gamma_ratio
from ..exceptions import InvalidDof

__all__ = ["betainc", "student_t_cdf"]

_EPS = 1e-15
_TINY = 1e-300
_MAX_TERMS = 20_000


def _betacf(a: float, b: float, x: np.ndarray) -> np.ndarray:
    """Continued fraction for I_x(a, b), modified Lentz, vectorized over ``x``."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _TINY, _TINY, d)
    d = 1.0 / d
    h = d.copy()
    active = np.arange(x.size)
    for m in range(1, _MAX_TERMS + 1):
        xa = x[active]
        m2 = 2 * m
        aa = m * (b - m) * xa / ((qam + m2) * (a + m2))
        da = 1.0 + aa * d[active]
        da = np.where(np.abs(da) < _TINY, _TINY, da)
        ca = 1.0 + aa / c[active]
        ca = np.where(np.abs(ca) < _TINY, _TINY, ca)
        da = 1.0 / da
        ha = h[active] * da * ca
        aa = -(a + m) * (qab + m) * xa / ((a + m2) * (qap + m2))
        da = 1.0 + aa * da
        da = np.where(np.abs(da) < _TINY, _TINY, da)
        ca = 1.0 + aa / ca
        ca = np.where(np.abs(ca) < _TINY, _TINY, ca)
        da = 1.0 / da
        delta = da * ca
        ha *= delta
        h[active], d[active], c[active] = ha, da, ca
        done = np.abs(delta - 1.0) <= _EPS
        active = active[~done]
        if active.size == 0:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge for a={a}, b={b}")


def betainc(a: float, b: float, x, xc=None):
    """Regularized incomplete beta ``I_x(a, b)``.

    ``xc`` optionally supplies ``1 - x`` computed without cancellation. The
    continued fraction is evaluated directly below ``x = (a+1)/(a+b+2)`` and
    through ``I_x(a, b) = 1 - I_{1-x}(b, a)`` above it.
    """
    a, b = float(a), float(b)
    if not (a > 0.0 and b > 0.0):
        raise ValueError(f"betainc needs a > 0 and b > 0, got a={a}, b={b}")
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    xc_arr = 1.0 - x_arr if xc is None else np.atleast_1d(np.asarray(xc, dtype=float))
    if np.any((x_arr < 0.0) | (x_arr > 1.0)):
        raise ValueError("betainc argument must lie in [0, 1]")
    big, small = max(a, b), min(a, b)
    lbeta = math.lgamma(small) - log_gamma_ratio(big, small)
    with np.errstate(divide="ignore"):
        log_front = a * np.log(x_arr) + b * np.log(xc_arr) - lbeta
    front = np.exp(log_front)
    out = np.empty_like(x_arr)
    direct = x_arr < (a + 1.0) / (a + b + 2.0)
    if np.any(direct):
        idx = np.flatnonzero(direct & (front > 0.0))
        out[direct] = 0.0
        if idx.size:
            out[idx] = front[idx] * _betacf(a, b, x_arr[idx]) / a
    flip = ~direct
    if np.any(flip):
        idx = np.flatnonzero(flip & (front > 0.0))
        out[flip] = 1.0
        if idx.size:
            out[idx] = 1.0 - front[idx] * _betacf(b, a, xc_arr[idx]) / b
    return float(out[0]) if np.ndim(x) == 0 else out.reshape(np.shape(x))


def student_t_cdf(x, nu: float):
    """CDF of the standard univariate t with ``nu`` degrees of freedom.

    Uses ``P(|T| > |t|) = I_{nu/(nu+t^2)}(nu/2, 1/2)``.
    """
    nu = float(nu)
    if not (math.isfinite(nu) and nu > 0.0):
        raise InvalidDof(f"degrees of freedom must be finite and > 0, got {nu!r}")
    t = np.asarray(x, dtype=float)
    t2 = t * t
    denom = nu + t2
    both_tails = betainc(0.5 * nu, 0.5, np.atleast_1d(nu / denom), np.atleast_1d(t2 / denom))
    lower = 0.5 * both_tails
    out = np.where(np.atleast_1d(t) < 0.0, lower, 1.0 - lower)
    out = np.where(np.isposinf(np.atleast_1d(t)), 1.0, out)
    out = np.where(np.isneginf(np.atleast_1d(t)), 0.0, out)
    return float(out[0]) if t.ndim == 0 else out.reshape(t.shape)
