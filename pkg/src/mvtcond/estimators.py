"""scikit-learn compatible wrappers.

These estimators do not estimate anything: the distribution is fixed by the
constructor arguments and ``fit`` only validates them against the data
shape. They exist so the density, the conditional regression and the
independence residual can sit inside pipelines, grid searches and
``clone``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, DensityMixin, RegressorMixin, TransformerMixin
from sklearn.utils import check_random_state
from sklearn.utils.validation import check_array, check_is_fitted

from .conditioning import Partition, conditional_ingredients, independence_residual
from .distribution import MVTParams, log_pdf, sample

__all__ = ["ConditionalTRegressor", "IndependenceResidualTransformer", "MultivariateT"]


class _FixedMVT(BaseEstimator):
    def __init__(self, mu=None, sigma=None, nu: float = 1.0):
        self.mu = mu
        self.sigma = sigma
        self.nu = nu

    def _build(self) -> MVTParams:
        if self.mu is None or self.sigma is None:
            raise ValueError(
                f"{type(self).__name__} needs mu and sigma; parameter estimation is not supported"
            )
        return MVTParams(np.asarray(self.mu, dtype=float), np.asarray(self.sigma, dtype=float), self.nu)

    def _check_width(self, X, width: int):
        X = check_array(X, ensure_2d=True, dtype=np.float64)
        if X.shape[1] != width:
            raise ValueError(f"X has {X.shape[1]} features, but {type(self).__name__} expects {width}")
        return X


class MultivariateT(DensityMixin, _FixedMVT):
    """Density estimator interface for a fixed t_p(mu, sigma, nu).

    Examples
    --------
    >>> import numpy as np
    >>> est = MultivariateT(mu=[0.0], sigma=[[1.0]], nu=1.0).fit(np.zeros((1, 1)))
    >>> round(float(np.exp(est.score_samples([[0.0]]))[0]), 12)  # 1 / pi
    0.318309886184
    """

    def fit(self, X=None, y=None):
        self.params_ = self._build()
        self.n_features_in_ = self.params_.dim
        if X is not None:
            self._check_width(X, self.n_features_in_)
        return self

    def score_samples(self, X) -> np.ndarray:
        check_is_fitted(self, "params_")
        return log_pdf(self.params_, self._check_width(X, self.n_features_in_))

    def score(self, X, y=None) -> float:
        """Mean log density over the rows of ``X``."""
        return float(np.mean(self.score_samples(X)))

    def sample(self, n_samples: int = 1, random_state=None) -> np.ndarray:
        check_is_fitted(self, "params_")
        rng = np.random.default_rng(check_random_state(random_state).randint(2**32))
        return sample(self.params_, n_samples, rng)


class _Conditional(_FixedMVT):
    def __init__(self, mu=None, sigma=None, nu: float = 1.0, observed: Sequence[int] = (0,)):
        super().__init__(mu=mu, sigma=sigma, nu=nu)
        self.observed = observed

    def _fit(self):
        self.params_ = self._build()
        self.partition_ = Partition.from_observed(self.observed, self.params_.dim)
        if self.partition_.p1 == 0 or self.partition_.p2 == 0:
            raise ValueError("observed must name at least one and not all coordinates")


class ConditionalTRegressor(RegressorMixin, _Conditional):
    """Predict the free coordinates from the observed ones by the conditional location.

    ``X`` holds the observed coordinates in the order given by ``observed``;
    predictions cover the remaining coordinates in ascending index order.
    """

    def fit(self, X=None, y=None):
        self._fit()
        self.n_features_in_ = self.partition_.p1
        if X is not None:
            self._check_width(X, self.n_features_in_)
        return self

    def predict(self, X) -> np.ndarray:
        check_is_fitted(self, "params_")
        X = self._check_width(X, self.n_features_in_)
        location, _, _ = conditional_ingredients(self.params_, self.partition_, X)
        return location[:, 0] if self.partition_.p2 == 1 else location

    def predict_scale(self, X) -> np.ndarray:
        """Conditional scale matrices, shape ``(n, p2, p2)``."""
        check_is_fitted(self, "params_")
        X = self._check_width(X, self.n_features_in_)
        _, d1, base = conditional_ingredients(self.params_, self.partition_, X)
        inflation = (self.params_.nu + d1) / (self.params_.nu + self.partition_.p1)
        return inflation[:, None, None] * base


class IndependenceResidualTransformer(TransformerMixin, _Conditional):
    """Map full rows to the scaled residual of the free block, independent of the observed block."""

    def fit(self, X=None, y=None):
        self._fit()
        self.n_features_in_ = self.params_.dim
        if X is not None:
            self._check_width(X, self.n_features_in_)
        return self

    def transform(self, X) -> np.ndarray:
        check_is_fitted(self, "params_")
        X = self._check_width(X, self.n_features_in_)
        part = self.partition_
        return independence_residual(self.params_, part, X[:, list(part.block1)], X[:, list(part.block2)])

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        check_is_fitted(self, "params_")
        return np.array([f"residual_x{i}" for i in self.partition_.block2], dtype=object)
