"""Gaussian discriminant classifiers: shared-covariance (LDA) and per-class (QDA).

Covariances use the population convention (divisor n).  A covariance that is
numerically singular gets a ridge of 1e-6 on its diagonal, with a warning,
unless shrinkage already regularized it.
"""

from __future__ import annotations

import warnings

import numpy as np

from ..utils import as_float_matrix, as_label_vector

_JITTER = 1e-6


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=np.float64)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def ledoit_wolf_shrinkage(Z: np.ndarray) -> float:
    """Shrinkage intensity toward the scaled identity for centered data Z."""
    n, d = Z.shape
    if n < 2:
        return 0.0
    Z2 = Z**2
    emp_trace = Z2.sum(axis=0) / n
    mu = emp_trace.sum() / d
    beta = float(np.sum(Z2.T @ Z2))
    delta = float(np.sum((Z.T @ Z) ** 2)) / n**2
    beta = (beta / n - delta) / (d * n)
    delta = (delta - 2.0 * mu * emp_trace.sum() + d * mu**2) / d
    if delta <= 0:
        return 0.0
    beta = min(beta, delta)
    return 0.0 if beta <= 0 else float(beta / delta)


def _is_degenerate(S: np.ndarray) -> bool:
    eigvals = np.linalg.eigvalsh(S)
    return bool(eigvals[0] <= _TOL_REL * max(eigvals[-1], 1.0))


_TOL_REL = 1e-12


class LinearDiscriminant:
    """Two-class LDA with a choice of covariance solver.

    All three solvers invert the same (possibly shrunk) pooled covariance;
    they differ only in the factorization used: full SVD pseudo-inverse,
    least-squares solve, or eigendecomposition.  On well-conditioned data
    they agree to high precision.
    """

    def __init__(self, solver: str = "svd", shrinkage: str = "none"):
        if solver not in ("svd", "lsqr", "eigen"):
            raise ValueError(f"unknown solver {solver!r}")
        if shrinkage not in ("none", "auto"):
            raise ValueError(f"unknown shrinkage {shrinkage!r}")
        self.solver = solver
        self.shrinkage = shrinkage
        self.coef_: np.ndarray | None = None
        self.intercept_: float = 0.0
        self.n_features_: int | None = None

    def fit(self, X, y) -> "LinearDiscriminant":
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0])
        n, d = X.shape
        self.n_features_ = d
        mu0 = X[y == 0].mean(axis=0)
        mu1 = X[y == 1].mean(axis=0)
        pi1 = float((y == 1).sum()) / n
        pi0 = 1.0 - pi1

        Z = X.copy()
        Z[y == 0] -= mu0
        Z[y == 1] -= mu1
        S = Z.T @ Z / n

        if self.shrinkage == "auto":
            lam = ledoit_wolf_shrinkage(Z)
            mu = np.trace(S) / d
            S = (1.0 - lam) * S + lam * mu * np.eye(d)
        elif _is_degenerate(S):
            warnings.warn(
                "pooled covariance is singular; adding ridge jitter 1e-6",
                RuntimeWarning,
            )
            S = S + _JITTER * np.eye(d)

        diff = mu1 - mu0
        if self.solver == "svd":
            U, s, Vt = np.linalg.svd(S, hermitian=True)
            cutoff = max(s[0], 1.0) * 1e-15
            inv_s = np.where(s > cutoff, 1.0 / np.maximum(s, cutoff), 0.0)
            w = Vt.T @ (inv_s * (U.T @ diff))
        elif self.solver == "lsqr":
            w = np.linalg.lstsq(S, diff, rcond=None)[0]
        else:
            vals, vecs = np.linalg.eigh(S)
            cutoff = max(vals[-1], 1.0) * 1e-15
            inv = np.where(vals > cutoff, 1.0 / np.maximum(vals, cutoff), 0.0)
            w = vecs @ (inv * (vecs.T @ diff))

        self.coef_ = w
        self.intercept_ = float(-0.5 * (mu0 + mu1) @ w + np.log(pi1 / pi0))
        return self

    def score_many(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        if X.shape[1] != self.n_features_:
            raise ValueError(f"expected {self.n_features_} features, got {X.shape[1]}")
        return _sigmoid(X @ self.coef_ + self.intercept_)

    def to_dict(self) -> dict:
        return {
            "solver": self.solver,
            "shrinkage": self.shrinkage,
            "coef": self.coef_.tolist(),
            "intercept": self.intercept_,
            "n_features": self.n_features_,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "LinearDiscriminant":
        model = cls(solver=doc["solver"], shrinkage=doc["shrinkage"])
        model.coef_ = np.asarray(doc["coef"], dtype=np.float64)
        model.intercept_ = float(doc["intercept"])
        model.n_features_ = doc["n_features"]
        return model


class QuadraticDiscriminant:
    """Two-class QDA with per-class Gaussian densities."""

    def __init__(self):
        self.means_: np.ndarray | None = None
        self.precisions_: np.ndarray | None = None
        self.logdets_: np.ndarray | None = None
        self.log_priors_: np.ndarray | None = None
        self.n_features_: int | None = None

    def fit(self, X, y) -> "QuadraticDiscriminant":
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0])
        n, d = X.shape
        self.n_features_ = d
        means, precisions, logdets, log_priors = [], [], [], []
        for cls in (0, 1):
            rows = X[y == cls]
            mu = rows.mean(axis=0)
            Z = rows - mu
            S = Z.T @ Z / len(rows)
            if _is_degenerate(S):
                warnings.warn(
                    f"class {cls} covariance is singular; adding ridge jitter 1e-6",
                    RuntimeWarning,
                )
                S = S + _JITTER * np.eye(d)
            sign, logdet = np.linalg.slogdet(S)
            if sign <= 0:
                S = S + _JITTER * np.eye(d)
                sign, logdet = np.linalg.slogdet(S)
            means.append(mu)
            precisions.append(np.linalg.inv(S))
            logdets.append(logdet)
            log_priors.append(np.log(len(rows) / n))
        self.means_ = np.asarray(means)
        self.precisions_ = np.asarray(precisions)
        self.logdets_ = np.asarray(logdets)
        self.log_priors_ = np.asarray(log_priors)
        return self

    def _log_posteriors(self, X: np.ndarray) -> np.ndarray:
        scores = np.empty((X.shape[0], 2))
        for cls in (0, 1):
            Z = X - self.means_[cls]
            maha = np.einsum("ij,jk,ik->i", Z, self.precisions_[cls], Z)
            scores[:, cls] = -0.5 * (self.logdets_[cls] + maha) + self.log_priors_[cls]
        return scores

    def score_many(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        if X.shape[1] != self.n_features_:
            raise ValueError(f"expected {self.n_features_} features, got {X.shape[1]}")
        scores = self._log_posteriors(X)
        return _sigmoid(scores[:, 1] - scores[:, 0])

    def to_dict(self) -> dict:
        return {
            "means": self.means_.tolist(),
            "precisions": self.precisions_.tolist(),
            "logdets": self.logdets_.tolist(),
            "log_priors": self.log_priors_.tolist(),
            "n_features": self.n_features_,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "QuadraticDiscriminant":
        model = cls()
        model.means_ = np.asarray(doc["means"], dtype=np.float64)
        model.precisions_ = np.asarray(doc["precisions"], dtype=np.float64)
        model.logdets_ = np.asarray(doc["logdets"], dtype=np.float64)
        model.log_priors_ = np.asarray(doc["log_priors"], dtype=np.float64)
        model.n_features_ = doc["n_features"]
        return model
