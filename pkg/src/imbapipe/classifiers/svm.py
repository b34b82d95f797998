"""Kernel SVM trained with Pegasos-style stochastic subgradient steps.

This is a primal stochastic solver over an implicit kernel expansion: each
margin violation adds the violating sample to a support set whose size is
capped by a budget (the entry with the smallest accumulated coefficient is
evicted first).  It approximates the hinge-loss SVM rather than solving the
dual exactly, which keeps training linear in the iteration count.
"""

from __future__ import annotations

import numpy as np

from ..resampling import squared_distances
from ..utils import as_float_matrix, as_label_vector
from .discriminant import _sigmoid


class PegasosSVC:
    """Hinge-loss kernel classifier.

    ``kernel`` is one of ``rbf``, ``poly`` (with ``degree``), ``sigmoid``.
    The kernel scale gamma defaults to 1 / (d * var(X)), and C maps onto the
    Pegasos regularizer as lambda = 1 / (C * n).
    """

    def __init__(
        self,
        kernel: str = "rbf",
        degree: int = 3,
        C: float = 1.0,
        coef0: float = 0.0,
        budget: int = 1024,
        iterations: int | None = None,
        seed: int = 0,
    ):
        if kernel not in ("rbf", "poly", "sigmoid"):
            raise ValueError(f"unknown kernel {kernel!r}")
        if C <= 0:
            raise ValueError("C must be > 0")
        if kernel == "poly" and degree < 1:
            raise ValueError("degree must be >= 1")
        self.kernel = kernel
        self.degree = degree
        self.C = C
        self.coef0 = coef0
        self.budget = budget
        self.iterations = iterations
        self.seed = seed
        self.gamma_: float = 1.0
        self.support_X_: np.ndarray | None = None
        self.support_coef_: np.ndarray | None = None
        self.converged = True
        self.n_features_: int | None = None

    def _kernel_matrix(self, A: np.ndarray, B: np.ndarray) -> np.ndarray:
        if self.kernel == "rbf":
            return np.exp(-self.gamma_ * squared_distances(A, B))
        inner = self.gamma_ * (A @ B.T) + self.coef0
        if self.kernel == "poly":
            return inner**self.degree
        return np.tanh(inner)

    def fit(self, X, y) -> "PegasosSVC":
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0])
        n, d = X.shape
        self.n_features_ = d
        var = float(X.var())
        self.gamma_ = 1.0 / (d * var) if var > 0 else 1.0
        lam = 1.0 / (self.C * n)
        T = self.iterations or min(20_000, max(2_000, 5 * n))
        rng = np.random.default_rng(self.seed)
        signs = np.where(y == 1, 1.0, -1.0)

        sup_idx: list[int] = []
        alphas: list[float] = []
        slot_of: dict[int, int] = {}
        for t in range(1, T + 1):
            i = int(rng.integers(n))
            if sup_idx:
                k_row = self._kernel_matrix(X[i : i + 1], X[sup_idx])[0]
                margin = signs[i] / (lam * t) * float(
                    np.sum(np.asarray(alphas) * signs[sup_idx] * k_row)
                )
            else:
                margin = 0.0
            if margin < 1.0:
                slot = slot_of.get(i)
                if slot is not None:
                    alphas[slot] += 1.0
                else:
                    sup_idx.append(i)
                    alphas.append(1.0)
                    slot_of[i] = len(sup_idx) - 1
                    if len(sup_idx) > self.budget:
                        drop = int(np.argmin(alphas))
                        del slot_of[sup_idx[drop]]
                        sup_idx.pop(drop)
                        alphas.pop(drop)
                        slot_of = {idx: s for s, idx in enumerate(sup_idx)}
        if sup_idx:
            scale = 1.0 / (lam * T)
            self.support_X_ = X[sup_idx].copy()
            self.support_coef_ = np.asarray(alphas) * signs[sup_idx] * scale
        else:
            self.support_X_ = np.empty((0, d))
            self.support_coef_ = np.empty(0)
        return self

    def decision_many(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        if X.shape[1] != self.n_features_:
            raise ValueError(f"expected {self.n_features_} features, got {X.shape[1]}")
        if len(self.support_coef_) == 0:
            return np.zeros(X.shape[0])
        K = self._kernel_matrix(X, self.support_X_)
        return K @ self.support_coef_

    def score_many(self, X) -> np.ndarray:
        return _sigmoid(self.decision_many(X))

    def to_dict(self) -> dict:
        return {
            "kernel": self.kernel,
            "degree": self.degree,
            "C": self.C,
            "coef0": self.coef0,
            "budget": self.budget,
            "iterations": self.iterations,
            "seed": self.seed,
            "gamma": self.gamma_,
            "support_X": self.support_X_.tolist(),
            "support_coef": self.support_coef_.tolist(),
            "n_features": self.n_features_,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PegasosSVC":
        model = cls(
            kernel=doc["kernel"],
            degree=doc["degree"],
            C=doc["C"],
            coef0=doc["coef0"],
            budget=doc["budget"],
            iterations=doc["iterations"],
            seed=doc["seed"],
        )
        model.gamma_ = float(doc["gamma"])
        model.support_X_ = np.asarray(doc["support_X"], dtype=np.float64)
        model.support_coef_ = np.asarray(doc["support_coef"], dtype=np.float64)
        model.n_features_ = doc["n_features"]
        return model
