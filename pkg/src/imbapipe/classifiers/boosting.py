"""Gradient boosting on the logistic loss, with tree and linear boosters.

The tree booster adds depth-limited regression trees fitted to the loss's
gradients and hessians.  The linear booster keeps a single weight vector and
applies one damped Newton coordinate pass per round with elastic-net style
regularization (lambda2 on the L2 side, lambda1 soft-thresholding).
"""

from __future__ import annotations

import numpy as np

from ..utils import as_float_matrix, as_label_vector
from .discriminant import _sigmoid
from .tree import GradientTree


def _log_odds(y: np.ndarray) -> float:
    p = float(np.clip(y.mean(), 1e-12, 1.0 - 1e-12))
    return float(np.log(p / (1.0 - p)))


def logistic_loss(raw: np.ndarray, y: np.ndarray) -> float:
    """Mean logistic loss of raw scores; stable for large |raw|."""
    return float(np.mean(np.logaddexp(0.0, raw) - y * raw))


class GradientBoosting:
    """Binary gradient boosting with a choice of booster."""

    def __init__(
        self,
        booster: str = "gbtree",
        learning_rate: float = 0.1,
        estimators: int = 100,
        max_depth: int = 3,
        reg_lambda: float = 1.0,
        reg_alpha: float = 0.0,
        seed: int = 0,
    ):
        if booster not in ("gbtree", "gblinear"):
            raise ValueError(f"unsupported booster {booster!r}")
        if learning_rate <= 0:
            raise ValueError("learning_rate must be > 0")
        if estimators < 1:
            raise ValueError("estimators must be >= 1")
        self.booster = booster
        self.learning_rate = learning_rate
        self.estimators = estimators
        self.max_depth = max_depth
        self.reg_lambda = reg_lambda
        self.reg_alpha = reg_alpha
        self.seed = seed
        self.base_score_: float = 0.0
        self.trees_: list[GradientTree] = []
        self.coef_: np.ndarray | None = None
        self.intercept_: float = 0.0
        self.train_losses_: list[float] = []
        self.converged = True
        self.n_features_: int | None = None

    def fit(self, X, y) -> "GradientBoosting":
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0])
        self.n_features_ = X.shape[1]
        self.base_score_ = _log_odds(y)
        yf = y.astype(np.float64)
        raw = np.full(X.shape[0], self.base_score_)
        self.train_losses_ = [logistic_loss(raw, yf)]
        if self.booster == "gbtree":
            self.trees_ = []
            for _ in range(self.estimators):
                p = _sigmoid(raw)
                grad = p - yf
                hess = np.maximum(p * (1.0 - p), 1e-12)
                tree = GradientTree(max_depth=self.max_depth, reg_lambda=self.reg_lambda)
                tree.fit(X, grad, hess)
                raw = raw + self.learning_rate * tree.predict_many(X)
                self.trees_.append(tree)
                self.train_losses_.append(logistic_loss(raw, yf))
        else:
            d = X.shape[1]
            self.coef_ = np.zeros(d)
            self.intercept_ = 0.0
            lam1, lam2 = self.reg_alpha, self.reg_lambda
            for _ in range(self.estimators):
                p = _sigmoid(raw)
                grad = p - yf
                hess = np.maximum(p * (1.0 - p), 1e-12)
                db = -grad.sum() / hess.sum()
                self.intercept_ += self.learning_rate * db
                raw = raw + self.learning_rate * db
                gj = X.T @ grad + lam2 * self.coef_
                hj = (X * X).T @ hess + lam2
                if lam1 > 0:
                    target = self.coef_ - gj / hj
                    shrunk = np.sign(target) * np.maximum(np.abs(target) - lam1 / hj, 0.0)
                    dw = shrunk - self.coef_
                else:
                    dw = -gj / hj
                self.coef_ += self.learning_rate * dw
                raw = raw + self.learning_rate * (X @ dw)
                self.train_losses_.append(logistic_loss(raw, yf))
        return self

    def raw_scores(self, X: np.ndarray) -> np.ndarray:
        raw = np.full(X.shape[0], self.base_score_)
        if self.booster == "gbtree":
            for tree in self.trees_:
                raw += self.learning_rate * tree.predict_many(X)
        else:
            raw += X @ self.coef_ + self.intercept_
        return raw

    def score_many(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        if X.shape[1] != self.n_features_:
            raise ValueError(f"expected {self.n_features_} features, got {X.shape[1]}")
        return _sigmoid(self.raw_scores(X))

    def to_dict(self) -> dict:
        doc = {
            "booster": self.booster,
            "learning_rate": self.learning_rate,
            "estimators": self.estimators,
            "max_depth": self.max_depth,
            "reg_lambda": self.reg_lambda,
            "reg_alpha": self.reg_alpha,
            "seed": self.seed,
            "base_score": self.base_score_,
            "n_features": self.n_features_,
        }
        if self.booster == "gbtree":
            doc["trees"] = [tree.to_dict() for tree in self.trees_]
        else:
            doc["coef"] = self.coef_.tolist()
            doc["intercept"] = self.intercept_
        return doc

    @classmethod
    def from_dict(cls, doc: dict) -> "GradientBoosting":
        model = cls(
            booster=doc["booster"],
            learning_rate=doc["learning_rate"],
            estimators=doc["estimators"],
            max_depth=doc["max_depth"],
            reg_lambda=doc["reg_lambda"],
            reg_alpha=doc["reg_alpha"],
            seed=doc["seed"],
        )
        model.base_score_ = float(doc["base_score"])
        model.n_features_ = doc["n_features"]
        if model.booster == "gbtree":
            model.trees_ = [GradientTree.from_dict(t) for t in doc["trees"]]
        else:
            model.coef_ = np.asarray(doc["coef"], dtype=np.float64)
            model.intercept_ = float(doc["intercept"])
        return model
