"""Marginals and conditionals of the multivariate t.

For ``X ~ t_p(mu, Sigma, nu)`` split into an observed block ``X1`` (size p1)
and a free block ``X2`` (size p2):

* ``X1 ~ t_p1(mu1, S11, nu)``
* ``X2 | X1 ~ t_p2(mu_2|1, (nu + d1) / (nu + p1) * S22|1, nu + p1)`` where
  ``mu_2|1 = mu2 + S21 S11^{-1} (X1 - mu1)``, ``S22|1`` is the Schur
  complement of ``S11`` and ``d1`` the squared Mahalanobis distance of ``X1``.
* the latent scale has posterior ``q | X1 ~ chi2_(nu+p1) / (nu + d1)``.
* ``sqrt((nu + p1) / (nu + d1)) (X2 - mu_2|1)`` is independent of ``X1``.

Functions taking ``x1`` accept a single observation ``(p1,)`` or a batch
``(n, p1)``; batched calls return batched ingredients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

from .distribution import MVTParams, ScaledChiSquare, sample_scaled_chisq
from .exceptions import DimensionMismatch, InvalidPartition
from .linalg import Partition, cholesky

__all__ = [
    "ConditionalSpec",
    "Partition",
    "condition",
    "conditional_ingredients",
    "conditional_sample_augmented",
    "independence_residual",
    "marginal",
    "q_posterior",
    "regression_location",
    "unnormalized_conditional_logpdf",
]


@dataclass(frozen=True, eq=False)
class ConditionalSpec:
    """Ingredients of the conditional law of the free block.

    The law itself is ``t(location, inflation * base_scale, dof)``; the pieces
    are kept apart so each can be checked on its own.
    """

    location: np.ndarray
    base_scale: np.ndarray
    inflation: float
    dof: float
    d1: float

    @property
    def scale(self) -> np.ndarray:
        return self.inflation * self.base_scale

    def to_dict(self) -> dict[str, Any]:
        return {
            "location": self.location.tolist(),
            "base_scale": self.base_scale.tolist(),
            "inflation": self.inflation,
            "dof": self.dof,
            "d1": self.d1,
        }


@dataclass(frozen=True, eq=False)
class _Pieces:
    mu2: np.ndarray
    s21: np.ndarray
    schur: np.ndarray
    whitened: np.ndarray  # L11^{-1} (x1 - mu1), shape (p1,) or (n, p1)
    alpha: np.ndarray  # S11^{-1} (x1 - mu1), same shape

    @property
    def location(self) -> np.ndarray:
        return self.mu2 + self.alpha @ self.s21.T

    @property
    def d1(self):
        w = self.whitened
        return float(w @ w) if w.ndim == 1 else np.einsum("ij,ij->i", w, w)


def _check_partition(params: MVTParams, part: Partition | Sequence[int]) -> Partition:
    if not isinstance(part, Partition):
        part = Partition.from_observed(part, params.dim)
    part.check(params.dim)
    if part.p2 == 0:
        raise InvalidPartition("free block is empty; nothing left to condition")
    return part


def _pieces(params: MVTParams, part: Partition, x1) -> _Pieces:
    x1 = np.asarray(x1, dtype=float)
    if x1.ndim == 0:
        x1 = x1.reshape(1)
    if x1.ndim not in (1, 2) or x1.shape[-1] != part.p1:
        raise DimensionMismatch(f"x1 has shape {x1.shape}, observed block has {part.p1} coordinates")
    if not np.all(np.isfinite(x1)):
        raise ValueError("x1 has non-finite entries")
    s11, s21, s22 = part.blocks(params.sigma)
    mu = params.mu
    mu2 = mu[list(part.block2)]
    if part.p1 == 0:
        return _Pieces(mu2, s21, s22.copy(), x1, x1)
    f11 = cholesky(s11)
    regression = f11.whiten(s21)  # S21 L11^{-T}
    schur = s22 - regression @ regression.T
    schur = 0.5 * (schur + schur.T)
    r1 = x1 - mu[list(part.block1)]
    whitened = f11.whiten(r1)
    # LU solve: exact for diagonal S11, where two triangular solves round twice
    alpha = np.linalg.solve(s11, r1.T).T
    return _Pieces(mu2, s21, schur, whitened, alpha)


def marginal(params: MVTParams, keep: Partition | Sequence[int]) -> MVTParams:
    """Law of the coordinates ``keep`` (in that order): ``t(mu_keep, S_keep, nu)``."""
    idx = keep.block1 if isinstance(keep, Partition) else tuple(int(i) for i in keep)
    if not idx:
        raise InvalidPartition("marginal needs at least one coordinate")
    if len(set(idx)) != len(idx) or not all(0 <= i < params.dim for i in idx):
        raise InvalidPartition(f"indices {idx} must be distinct and in range({params.dim})")
    ix = np.asarray(idx, dtype=int)
    return MVTParams(params.mu[ix], params.sigma[np.ix_(ix, ix)], params.nu)


def regression_location(params: MVTParams, part: Partition | Sequence[int], x1) -> np.ndarray:
    """``mu2 + S21 S11^{-1} (x1 - mu1)``."""
    part = _check_partition(params, part)
    return _pieces(params, part, x1).location


def condition(
    params: MVTParams, part: Partition | Sequence[int], x1
) -> tuple[ConditionalSpec, MVTParams]:
    """Conditional law of the free block given ``X1 = x1``.

    Returns the :class:`ConditionalSpec` and the equivalent :class:`MVTParams`
    over the free coordinates (in ``part.block2`` order). An empty observed
    block returns the unconditioned law of the free block.
    """
    part = _check_partition(params, part)
    pc = _pieces(params, part, x1)
    if pc.whitened.ndim != 1:
        raise DimensionMismatch("condition takes a single observation; use the batched helpers for many")
    nu, p1 = params.nu, part.p1
    d1 = pc.d1
    inflation = (nu + d1) / (nu + p1)
    spec = ConditionalSpec(
        location=pc.location,
        base_scale=pc.schur,
        inflation=float(inflation),
        dof=nu + p1,
        d1=d1,
    )
    return spec, MVTParams(spec.location, spec.scale, spec.dof)


def q_posterior(params: MVTParams, part: Partition | Sequence[int], x1) -> ScaledChiSquare:
    """Posterior of the latent scale given ``x1``: ``chi2_(nu+p1) / (nu+d1)``."""
    part = _check_partition(params, part)
    d1 = _pieces(params, part, x1).d1
    if np.ndim(d1) != 0:
        raise DimensionMismatch("q_posterior takes a single observation")
    return ScaledChiSquare(params.nu + part.p1, params.nu + d1)


def conditional_sample_augmented(
    params: MVTParams,
    part: Partition | Sequence[int],
    x1,
    n: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Two-stage draw of ``X2 | X1 = x1``, returned as an ``(n, p2)`` array.

    Each row draws ``w`` from the latent-scale posterior and then a normal
    with location ``mu_2|1`` and scale ``S22|1 / w``.
    """
    part = _check_partition(params, part)
    pc = _pieces(params, part, x1)
    if pc.whitened.ndim != 1:
        raise DimensionMismatch("conditional sampling takes a single observation")
    n = int(n)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    post = ScaledChiSquare(params.nu + part.p1, params.nu + pc.d1)
    w = sample_scaled_chisq(post, rng, n)
    z = rng.standard_normal((n, part.p2))
    lower = cholesky(pc.schur).lower
    return pc.location + (z / np.sqrt(w)[:, None]) @ lower.T


def unnormalized_conditional_logpdf(params: MVTParams, part: Partition | Sequence[int], x1, x2):
    """Kernel of the conditional density, zero at the conditional location.

    ``-(nu + p)/2 * log(1 + r^T V^{-1} r / (nu + p1))`` with ``r = x2 - mu_2|1``
    and ``V = (nu + d1)/(nu + p1) * S22|1``. Differs from the normalized
    conditional log density by a constant that depends on ``x1`` only.
    ``x2`` may be a batch ``(m, p2)`` sharing one ``x1``.
    """
    part = _check_partition(params, part)
    pc = _pieces(params, part, x1)
    if pc.whitened.ndim != 1:
        raise DimensionMismatch("x1 must be a single observation")
    x2 = np.asarray(x2, dtype=float)
    if x2.ndim == 0:
        x2 = x2.reshape(1)
    if x2.ndim not in (1, 2) or x2.shape[-1] != part.p2:
        raise DimensionMismatch(f"x2 has shape {x2.shape}, free block has {part.p2} coordinates")
    nu, p1 = params.nu, part.p1
    inflation = (nu + pc.d1) / (nu + p1)
    z = cholesky(inflation * pc.schur).whiten(x2 - pc.location)
    quad = z @ z if z.ndim == 1 else np.einsum("ij,ij->i", z, z)
    out = -0.5 * (nu + params.dim) * np.log1p(quad / (nu + p1))
    return float(out) if np.ndim(out) == 0 else out


def independence_residual(params: MVTParams, part: Partition | Sequence[int], x1, x2) -> np.ndarray:
    """``sqrt((nu + p1) / (nu + d1)) * (x2 - mu_2|1)``.

    Batched inputs ``x1 (n, p1)``, ``x2 (n, p2)`` give one residual per row.
    """
    part = _check_partition(params, part)
    pc = _pieces(params, part, x1)
    x2 = np.asarray(x2, dtype=float)
    if x2.ndim == 0:
        x2 = x2.reshape(1)
    if x2.shape[-1] != part.p2 or x2.ndim != pc.whitened.ndim or x2.shape[:-1] != pc.whitened.shape[:-1]:
        raise DimensionMismatch(f"x2 of shape {x2.shape} does not pair with x1")
    factor = np.sqrt((params.nu + part.p1) / (params.nu + pc.d1))
    resid = x2 - pc.location
    return factor * resid if resid.ndim == 1 else factor[:, None] * resid


def conditional_ingredients(params: MVTParams, part: Partition | Sequence[int], x1):
    """Batched ``(location, d1, base_scale)`` for many observations at once."""
    part = _check_partition(params, part)
    pc = _pieces(params, part, x1)
    return pc.location, pc.d1, pc.schur
