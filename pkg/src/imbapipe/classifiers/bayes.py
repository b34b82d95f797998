"""Gaussian naive Bayes for binary targets."""

from __future__ import annotations

import numpy as np

from ..utils import as_float_matrix, as_label_vector
from .discriminant import _sigmoid


class GaussianNB:
    """Independent per-feature Gaussians per class.

    Variances use divisor n and are floored by a smoothing term of
    1e-9 times the largest overall feature variance, so constant
    features cannot zero out a likelihood.
    """

    VAR_SMOOTHING = 1e-9

    def __init__(self):
        self.theta_: np.ndarray | None = None
        self.var_: np.ndarray | None = None
        self.log_priors_: np.ndarray | None = None
        self.n_features_: int | None = None

    def fit(self, X, y) -> "GaussianNB":
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0])
        n, d = X.shape
        self.n_features_ = d
        eps = self.VAR_SMOOTHING * float(X.var(axis=0).max())
        if eps == 0.0:
            eps = self.VAR_SMOOTHING
        theta = np.empty((2, d))
        var = np.empty((2, d))
        log_priors = np.empty(2)
        for cls in (0, 1):
            rows = X[y == cls]
            theta[cls] = rows.mean(axis=0)
            var[cls] = rows.var(axis=0) + eps
            log_priors[cls] = np.log(len(rows) / n)
        self.theta_ = theta
        self.var_ = var
        self.log_priors_ = log_priors
        return self

    def _joint_log_likelihood(self, X: np.ndarray) -> np.ndarray:
        out = np.empty((X.shape[0], 2))
        for cls in (0, 1):
            ll = -0.5 * np.sum(
                np.log(2.0 * np.pi * self.var_[cls])
                + (X - self.theta_[cls]) ** 2 / self.var_[cls],
                axis=1,
            )
            out[:, cls] = ll + self.log_priors_[cls]
        return out

    def score_many(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        if X.shape[1] != self.n_features_:
            raise ValueError(f"expected {self.n_features_} features, got {X.shape[1]}")
        jll = self._joint_log_likelihood(X)
        return _sigmoid(jll[:, 1] - jll[:, 0])

    def to_dict(self) -> dict:
        return {
            "theta": self.theta_.tolist(),
            "var": self.var_.tolist(),
            "log_priors": self.log_priors_.tolist(),
            "n_features": self.n_features_,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GaussianNB":
        model = cls()
        model.theta_ = np.asarray(doc["theta"], dtype=np.float64)
        model.var_ = np.asarray(doc["var"], dtype=np.float64)
        model.log_priors_ = np.asarray(doc["log_priors"], dtype=np.float64)
        model.n_features_ = doc["n_features"]
        return model
