"""Tree ensembles: adaptive boosting and randomized forests."""

from __future__ import annotations

import math

import numpy as np

from ..utils import as_float_matrix, as_label_vector, rng_for
from .tree import DecisionTree


class AdaBoost:
    """Discrete AdaBoost over depth-limited decision trees.

    Boosting stops early as soon as a round's weighted error reaches 0.5
    (nothing left to learn) or hits zero (training data separated).
    """

    def __init__(self, estimators: int = 50, base_depth: int = 5, seed: int = 0):
        if estimators < 1:
            raise ValueError("estimators must be >= 1")
        self.estimators = estimators
        self.base_depth = base_depth
        self.seed = seed
        self.trees_: list[DecisionTree] = []
        self.alphas_: list[float] = []
        self.converged = True

    def fit(self, X, y) -> "AdaBoost":
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0])
        n = X.shape[0]
        w = np.full(n, 1.0 / n)
        signs = np.where(y == 1, 1.0, -1.0)
        self.trees_ = []
        self.alphas_ = []
        for t in range(self.estimators):
            tree = DecisionTree(
                criterion="gini",
                splitter="best",
                max_depth=self.base_depth,
                seed=self.seed + t,
            )
            tree.fit(X, y, sample_weight=w)
            pred = tree.predict_many(X)
            miss = pred != y
            err = float(w[miss].sum())
            if err >= 0.5:
                break
            err = max(err, 1e-10)
            alpha = 0.5 * math.log((1.0 - err) / err)
            self.trees_.append(tree)
            self.alphas_.append(alpha)
            if err <= 1e-10:
                break
            pred_signs = np.where(pred == 1, 1.0, -1.0)
            w = w * np.exp(-alpha * signs * pred_signs)
            w /= w.sum()
        return self

    def score_many(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        if not self.trees_:
            return np.full(X.shape[0], 0.5)
        total = sum(self.alphas_)
        margin = np.zeros(X.shape[0])
        for tree, alpha in zip(self.trees_, self.alphas_):
            margin += alpha * np.where(tree.predict_many(X) == 1, 1.0, -1.0)
        # Weighted vote fraction for the positive class.
        return (margin / total + 1.0) / 2.0

    def to_dict(self) -> dict:
        return {
            "estimators": self.estimators,
            "base_depth": self.base_depth,
            "seed": self.seed,
            "alphas": list(self.alphas_),
            "trees": [tree.to_dict() for tree in self.trees_],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "AdaBoost":
        model = cls(estimators=doc["estimators"], base_depth=doc["base_depth"], seed=doc["seed"])
        model.alphas_ = [float(a) for a in doc["alphas"]]
        model.trees_ = [DecisionTree.from_dict(t) for t in doc["trees"]]
        return model


class _Forest:
    """Shared scaffolding for vote-averaging tree forests."""

    splitter = "best"
    bootstrap = True

    def __init__(self, trees: int = 100, criterion: str = "gini", seed: int = 0):
        if trees < 1:
            raise ValueError("trees must be >= 1")
        self.trees = trees
        self.criterion = criterion
        self.seed = seed
        self.members_: list[DecisionTree] = []
        self.converged = True

    def fit(self, X, y) -> "_Forest":
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0])
        n, d = X.shape
        max_features = max(1, int(math.isqrt(d)))
        self.members_ = []
        for t in range(self.trees):
            rng = rng_for(self.seed, "forest", t)
            tree_seed = int(rng.integers(2**63 - 1))
            if self.bootstrap:
                rows = rng.integers(0, n, size=n)
                Xt, yt = X[rows], y[rows]
                if len(np.unique(yt)) < 2:
                    # A bootstrap that lost a class would grow a stump that
                    # always votes one way; keep it, the vote still counts.
                    pass
            else:
                Xt, yt = X, y
            tree = DecisionTree(
                criterion=self.criterion,
                splitter=self.splitter,
                max_features=max_features,
                seed=tree_seed,
            )
            tree.fit(Xt, yt)
            self.members_.append(tree)
        return self

    def member_predictions(self, X) -> np.ndarray:
        """Per-tree 0/1 votes, shape (trees, rows). Exposed for testing."""
        X = as_float_matrix(X)
        return np.stack([tree.predict_many(X) for tree in self.members_])

    def score_many(self, X) -> np.ndarray:
        return self.member_predictions(X).mean(axis=0)

    def to_dict(self) -> dict:
        return {
            "trees": self.trees,
            "criterion": self.criterion,
            "seed": self.seed,
            "members": [tree.to_dict() for tree in self.members_],
        }

    @classmethod
    def from_dict(cls, doc: dict):
        model = cls(trees=doc["trees"], criterion=doc["criterion"], seed=doc["seed"])
        model.members_ = [DecisionTree.from_dict(t) for t in doc["members"]]
        return model


class RandomForest(_Forest):
    """Bootstrap samples, best-split trees on random feature subsets."""

    splitter = "best"
    bootstrap = True


class ExtraTrees(_Forest):
    """No bootstrap; one random threshold per candidate feature."""

    splitter = "random"
    bootstrap = False
