"""Small dense symmetric positive-definite linear algebra.

Everything here works on plain ``numpy`` arrays. Factorizations are cached in
:class:`SPDFactor` so that repeated solves and Mahalanobis distances against
the same scale matrix cost one triangular solve each.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import DimensionMismatch, InvalidPartition, NotPositiveDefinite, NotSymmetric

__all__ = [
    "SYMMETRY_RTOL",
    "Partition",
    "SPDFactor",
    "as_square_matrix",
    "as_vector",
    "cholesky",
    "mahalanobis_sq",
    "schur_complement",
    "solve_spd",
]

SYMMETRY_RTOL = 1e-8


def as_vector(x, name: str = "x") -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim != 1 or arr.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty 1-d vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def as_square_matrix(m, name: str = "matrix") -> np.ndarray:
    arr = np.asarray(m, dtype=float)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
        raise DimensionMismatch(f"{name} must be a non-empty square matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NotPositiveDefinite(f"{name} has non-finite entries")
    return arr


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float, copy=True)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class SPDFactor:
    """Lower Cholesky factor ``L`` of an SPD matrix, with ``log|L L^T|`` cached.

    Build these through :func:`cholesky`; the constructor does not re-check
    the factor.
    """

    lower: np.ndarray
    log_det: float = field(init=False)

    def __post_init__(self) -> None:
        lower = _freeze(self.lower)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "log_det", float(2.0 * np.sum(np.log(np.diag(lower)))))

    @property
    def dim(self) -> int:
        return self.lower.shape[0]

    def matrix(self) -> np.ndarray:
        """Reconstruct ``L @ L.T``."""
        return self.lower @ self.lower.T

    def whiten(self, diff: np.ndarray) -> np.ndarray:
        """Return ``L^{-1} diff``; ``diff`` has shape ``(p,)`` or ``(n, p)``."""
        diff = np.asarray(diff, dtype=float)
        if diff.shape[-1] != self.dim:
            raise DimensionMismatch(f"expected trailing dimension {self.dim}, got {diff.shape[-1]}")
        if diff.ndim == 1:
            return solve_triangular(self.lower, diff, lower=True, check_finite=False)
        return solve_triangular(self.lower, diff.T, lower=True, check_finite=False).T


def cholesky(m) -> SPDFactor:
    """Factor a symmetric positive-definite matrix.

    Asymmetry up to ``SYMMETRY_RTOL`` relative to the largest entry is
    absorbed by symmetrizing; anything larger raises :class:`NotSymmetric`.

    Raises
    ------
    NotPositiveDefinite
        If a pivot is non-positive or the matrix has non-finite entries.
    NotSymmetric
        If ``m`` is asymmetric beyond tolerance.
    """
    m = as_square_matrix(m)
    scale = float(np.max(np.abs(m)))
    asym = float(np.max(np.abs(m - m.T)))
    if asym > SYMMETRY_RTOL * scale:
        raise NotSymmetric(f"asymmetry {asym:.3g} exceeds relative tolerance {SYMMETRY_RTOL:g}")
    sym = 0.5 * (m + m.T)
    try:
        lower = np.linalg.cholesky(sym)
    except np.linalg.LinAlgError as exc:
        raise NotPositiveDefinite("matrix is not positive definite") from exc
    diag = np.diag(lower)
    if not (np.all(np.isfinite(lower)) and np.all(diag > 0.0)):
        raise NotPositiveDefinite("matrix is not positive definite")
    return SPDFactor(lower)


def solve_spd(f: SPDFactor, b) -> np.ndarray:
    """Solve ``(L L^T) y = b`` by forward then backward substitution."""
    b = np.asarray(b, dtype=float)
    if b.ndim not in (1, 2) or b.shape[0] != f.dim:
        raise DimensionMismatch(f"factor has dimension {f.dim}, right-hand side has shape {b.shape}")
    y = solve_triangular(f.lower, b, lower=True, check_finite=False)
    return solve_triangular(f.lower, y, lower=True, trans="T", check_finite=False)


def mahalanobis_sq(x, mu, f: SPDFactor):
    """Squared Mahalanobis distance ``(x - mu)^T S^{-1} (x - mu)`` with ``S = L L^T``.

    ``x`` may be a single point of shape ``(p,)`` (returns a float) or a batch
    of shape ``(n, p)`` (returns an array of length ``n``).
    """
    x = np.asarray(x, dtype=float)
    mu = np.asarray(mu, dtype=float)
    if mu.shape != (f.dim,) or x.ndim not in (1, 2) or x.shape[-1] != f.dim:
        raise DimensionMismatch(
            f"factor has dimension {f.dim}; got x of shape {x.shape} and mu of shape {mu.shape}"
        )
    z = f.whiten(x - mu)
    if z.ndim == 1:
        return float(z @ z)
    return np.einsum("ij,ij->i", z, z)


@dataclass(frozen=True)
class Partition:
    """Split of coordinates into an observed block (1) and a free block (2).

    The blocks are arbitrary disjoint index sets; their order is preserved, so
    ``Partition((2, 0), (1,))`` means "observe coordinates 2 then 0".
    An empty observed block is allowed and stands for "condition on nothing".
    """

    block1: tuple[int, ...]
    block2: tuple[int, ...]

    def __post_init__(self) -> None:
        b1 = tuple(int(i) for i in self.block1)
        b2 = tuple(int(i) for i in self.block2)
        object.__setattr__(self, "block1", b1)
        object.__setattr__(self, "block2", b2)
        both = b1 + b2
        if len(set(both)) != len(both):
            raise InvalidPartition(f"blocks {b1} and {b2} repeat an index")
        if any(i < 0 for i in both):
            raise InvalidPartition("indices must be non-negative")

    @classmethod
    def from_observed(cls, observed: Iterable[int], p: int) -> "Partition":
        """Observed coordinates in the given order; the rest, ascending, are free."""
        observed = tuple(int(i) for i in observed)
        bad = [i for i in observed if not 0 <= i < p]
        if bad:
            raise InvalidPartition(f"indices {bad} out of range for dimension {p}")
        rest = tuple(i for i in range(p) if i not in set(observed))
        return cls(observed, rest)

    @property
    def p1(self) -> int:
        return len(self.block1)

    @property
    def p2(self) -> int:
        return len(self.block2)

    @property
    def order(self) -> tuple[int, ...]:
        return self.block1 + self.block2

    def check(self, p: int) -> None:
        if sorted(self.order) != list(range(p)):
            raise InvalidPartition(
                f"blocks {self.block1} | {self.block2} do not partition range({p})"
            )

    def blocks(self, sigma: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Return ``(S11, S21, S22)`` in block order."""
        i1 = np.asarray(self.block1, dtype=int)
        i2 = np.asarray(self.block2, dtype=int)
        return sigma[np.ix_(i1, i1)], sigma[np.ix_(i2, i1)], sigma[np.ix_(i2, i2)]


def _partition_for(part: Partition | Sequence[int], p: int) -> Partition:
    if not isinstance(part, Partition):
        part = Partition.from_observed(part, p)
    part.check(p)
    return part


def schur_complement(sigma, part: Partition | Sequence[int]) -> np.ndarray:
    """``S22 - S21 S11^{-1} S12`` for the given partition.

    Computed as ``S22 - W^T W`` with ``W = L11^{-1} S12`` so the result is
    symmetric by construction.
    """
    sigma = as_square_matrix(sigma, "sigma")
    part = _partition_for(part, sigma.shape[0])
    s11, s21, s22 = part.blocks(sigma)
    if part.p1 == 0:
        return s22.copy()
    w = cholesky(s11).whiten(s21)  # rows of s21 whitened: (p2, p1)
    out = s22 - w @ w.T
    return 0.5 * (out + out.T)
