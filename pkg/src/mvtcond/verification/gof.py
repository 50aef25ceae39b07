"""Kolmogorov-Smirnov statistics and Monte Carlo checks of the conditional results."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np

from ..conditioning import Partition, conditional_ingredients
from ..distribution import MVTParams, sample
from ..exceptions import DofTooSmall, EmptySample, InvalidPartition

__all__ = [
    "KS_CRITICAL",
    "GofReport",
    "independence_check",
    "ks_2samp",
    "ks_statistic",
    "majority",
    "moment_suite",
]

# asymptotic Kolmogorov quantile at alpha ~ 0.01
KS_CRITICAL = 1.63


@dataclass(frozen=True)
class GofReport:
    """Outcome of one check; ``passed`` is always ``statistic <= threshold``.

    Composite checks keep their parts in ``components`` and report the number
    of failed parts against a threshold of zero.
    """

    statistic: float
    threshold: float
    n: int
    seed: int | None = None
    name: str = ""
    components: tuple["GofReport", ...] = field(default=(), repr=False)

    @property
    def passed(self) -> bool:
        return bool(self.statistic <= self.threshold)

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "statistic": float(self.statistic),
            "threshold": float(self.threshold),
            "n": int(self.n),
            "pass": self.passed,
            "seed": self.seed,
        }
        if self.name:
            out["name"] = self.name
        if self.components:
            out["components"] = [c.to_dict() for c in self.components]
        return out


def _composite(parts: Sequence[GofReport], n: int, seed: int | None, name: str) -> GofReport:
    failed = sum(not r.passed for r in parts)
    return GofReport(float(failed), 0.0, n, seed, name, tuple(parts))


def ks_statistic(samples, cdf: Callable[[np.ndarray], np.ndarray], name: str = "ks") -> GofReport:
    """One-sample KS distance between ``samples`` and a vectorized ``cdf``.

    Both one-sided gaps are taken at every order statistic; the threshold is
    ``1.63 / sqrt(n)``.
    """
    x = np.sort(np.asarray(samples, dtype=float).ravel())
    n = x.size
    if n == 0:
        raise EmptySample("KS statistic needs at least one sample")
    u = np.asarray(cdf(x), dtype=float)
    ranks = np.arange(1, n + 1)
    d_plus = np.max(ranks / n - u)
    d_minus = np.max(u - (ranks - 1) / n)
    return GofReport(float(max(d_plus, d_minus)), KS_CRITICAL / np.sqrt(n), n, name=name)


def ks_2samp(a, b, name: str = "ks2") -> GofReport:
    """Two-sample KS distance with threshold ``1.63 * sqrt((n + m) / (n m))``."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    n, m = a.size, b.size
    if n == 0 or m == 0:
        raise EmptySample("two-sample KS needs two non-empty samples")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / n
    fb = np.searchsorted(b, grid, side="right") / m
    stat = float(np.max(np.abs(fa - fb)))
    return GofReport(stat, KS_CRITICAL * np.sqrt((n + m) / (n * m)), n + m, name=name)


def majority(reports: Sequence[GofReport], required: int = 2, name: str = "majority") -> GofReport:
    """Pass when at least ``required`` of ``reports`` pass (used across seeds)."""
    failed = sum(not r.passed for r in reports)
    allowed = len(reports) - required
    n = sum(r.n for r in reports)
    return GofReport(float(failed), float(allowed), n, name=name, components=tuple(reports))


def _joint_split(params: MVTParams, part: Partition | Sequence[int], n: int, rng) -> tuple:
    if not isinstance(part, Partition):
        part = Partition.from_observed(part, params.dim)
    part.check(params.dim)
    if part.p1 == 0 or part.p2 == 0:
        raise InvalidPartition("both blocks must be non-empty")
    x = sample(params, n, rng)
    return part, x[:, list(part.block1)], x[:, list(part.block2)]


def independence_check(
    params: MVTParams,
    part: Partition | Sequence[int],
    n: int,
    rng: np.random.Generator,
    scaled: bool = True,
    seed: int | None = None,
) -> GofReport:
    """Monte Carlo check that the scaled regression residual is independent of X1.

    Two parts, both must pass:

    * every ``|corr(X1_j, residual_k)|`` below ``4 / sqrt(n)``;
    * for every residual coordinate, a two-sample KS test between draws with
      ``d1`` below and above its sample median.

    ``scaled=False`` checks the raw residual ``X2 - mu_2|1`` instead, which is
    uncorrelated with X1 but not independent of it.
    """
    if n < 10_000:
        raise ValueError(f"independence_check needs n >= 10^4, got {n}")
    part, x1, x2 = _joint_split(params, part, int(n), rng)
    location, d1, _ = conditional_ingredients(params, part, x1)
    resid = x2 - location
    if scaled:
        resid = np.sqrt((params.nu + part.p1) / (params.nu + d1))[:, None] * resid

    corr = np.corrcoef(x1.T, resid.T)[: part.p1, part.p1 :]
    corr_report = GofReport(float(np.max(np.abs(corr))), 4.0 / np.sqrt(n), n, name="max_abs_corr")

    low = d1 <= np.median(d1)
    parts = [corr_report]
    for k in range(part.p2):
        parts.append(ks_2samp(resid[low, k], resid[~low, k], name=f"split_ks[{k}]"))
    return _composite(parts, n, seed, "independence" if scaled else "independence_unscaled")


def moment_suite(
    params: MVTParams,
    part: Partition | Sequence[int],
    n: int,
    rng: np.random.Generator,
    seed: int | None = None,
) -> GofReport:
    """Check ``E[d1] = p1 nu / (nu - 2)`` and that the mean inflation factor exceeds one.

    Components: the z-score of the sample mean of ``d1`` (threshold 4) and
    ``1 - mean((nu + d1) / (nu + p1))`` (threshold 0).
    """
    nu = params.nu
    if nu <= 2.0:
        raise DofTooSmall(f"E[d1] is infinite for nu <= 2 (nu = {nu})")
    if n < 100_000:
        raise ValueError(f"moment_suite needs n >= 10^5, got {n}")
    part, x1, _ = _joint_split(params, part, int(n), rng)
    _, d1, _ = conditional_ingredients(params, part, x1)
    target = part.p1 * nu / (nu - 2.0)
    se = float(np.std(d1, ddof=1) / np.sqrt(n))
    z = abs(float(np.mean(d1)) - target) / se
    inflation = float(np.mean((nu + d1) / (nu + part.p1)))
    parts = [
        GofReport(z, 4.0, n, name="d1_mean_zscore"),
        GofReport(1.0 - inflation, 0.0, n, name="one_minus_mean_inflation"),
    ]
    return _composite(parts, n, seed, "moments")
