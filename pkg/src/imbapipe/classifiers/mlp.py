"""One-hidden-layer perceptron trained on the logistic loss.

The parameter gradient lives in :func:`loss_and_grads` as a pure function so
it can be checked against finite differences.  Training runs mini-batch SGD
or Adam with a fixed epoch cap and a plateau-based early stop.
"""

from __future__ import annotations

import warnings

import numpy as np

from ..utils import as_float_matrix, as_label_vector
from .discriminant import _sigmoid

ACTIVATIONS = ("relu", "tanh", "logistic")
OPTIMIZERS = ("sgd", "adam")


def _activate(name: str, Z: np.ndarray) -> np.ndarray:
    if name == "relu":
        return np.maximum(Z, 0.0)
    if name == "tanh":
        return np.tanh(Z)
    return _sigmoid(Z)


def _activate_grad(name: str, Z: np.ndarray, A: np.ndarray) -> np.ndarray:
    if name == "relu":
        return (Z > 0).astype(np.float64)
    if name == "tanh":
        return 1.0 - A * A
    return A * (1.0 - A)


def init_params(d: int, hidden: int, rng: np.random.Generator) -> dict[str, np.ndarray]:
    """Glorot-uniform weights, zero biases."""
    b1 = np.sqrt(6.0 / (d + hidden))
    b2 = np.sqrt(6.0 / (hidden + 1))
    return {
        "W1": rng.uniform(-b1, b1, size=(d, hidden)),
        "b1": np.zeros(hidden),
        "W2": rng.uniform(-b2, b2, size=(hidden, 1)),
        "b2": np.zeros(1),
    }


def forward(params: dict, X: np.ndarray, activation: str):
    Z1 = X @ params["W1"] + params["b1"]
    A1 = _activate(activation, Z1)
    z2 = (A1 @ params["W2"]).ravel() + params["b2"][0]
    return Z1, A1, z2


def loss_and_grads(params: dict, X: np.ndarray, y: np.ndarray, activation: str):
    """Mean logistic loss and its gradient w.r.t. every parameter array."""
    n = X.shape[0]
    Z1, A1, z2 = forward(params, X, activation)
    loss = float(np.mean(np.logaddexp(0.0, z2) - y * z2))
    p = _sigmoid(z2)
    dz2 = (p - y) / n
    grads = {
        "W2": A1.T @ dz2[:, None],
        "b2": np.array([dz2.sum()]),
    }
    dA1 = dz2[:, None] @ params["W2"].T
    dZ1 = dA1 * _activate_grad(activation, Z1, A1)
    grads["W1"] = X.T @ dZ1
    grads["b1"] = dZ1.sum(axis=0)
    return loss, grads


class MLP:
    """Binary classifier with one hidden layer and a sigmoid output."""

    def __init__(
        self,
        hidden: int = 100,
        activation: str = "relu",
        optimizer: str = "adam",
        learning_rate: float | None = None,
        batch_size: int = 32,
        max_epochs: int = 200,
        patience: int = 20,
        tol: float = 1e-6,
        seed: int = 0,
    ):
        if hidden < 1:
            raise ValueError("hidden must be >= 1")
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        if optimizer not in OPTIMIZERS:
            raise ValueError(f"unknown optimizer {optimizer!r}")
        self.hidden = hidden
        self.activation = activation
        self.optimizer = optimizer
        self.learning_rate = learning_rate or (0.1 if optimizer == "sgd" else 0.001)
        self.batch_size = batch_size
        self.max_epochs = max_epochs
        self.patience = patience
        self.tol = tol
        self.seed = seed
        self.params_: dict[str, np.ndarray] | None = None
        self.converged = False
        self.n_features_: int | None = None

    def fit(self, X, y) -> "MLP":
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0]).astype(np.float64)
        n, d = X.shape
        self.n_features_ = d
        rng = np.random.default_rng(self.seed)
        params = init_params(d, self.hidden, rng)

        m = {k: np.zeros_like(v) for k, v in params.items()}
        v = {k: np.zeros_like(val) for k, val in params.items()}
        beta1, beta2, eps = 0.9, 0.999, 1e-8
        step = 0

        best = np.inf
        stale = 0
        self.converged = False
        for _ in range(self.max_epochs):
            order = rng.permutation(n)
            epoch_loss = 0.0
            for start in range(0, n, self.batch_size):
                batch = order[start : start + self.batch_size]
                loss, grads = loss_and_grads(params, X[batch], y[batch], self.activation)
                epoch_loss += loss * len(batch)
                if self.optimizer == "sgd":
                    for k in params:
                        params[k] -= self.learning_rate * grads[k]
                else:
                    step += 1
                    for k in params:
                        m[k] = beta1 * m[k] + (1 - beta1) * grads[k]
                        v[k] = beta2 * v[k] + (1 - beta2) * grads[k] ** 2
                        mhat = m[k] / (1 - beta1**step)
                        vhat = v[k] / (1 - beta2**step)
                        params[k] -= self.learning_rate * mhat / (np.sqrt(vhat) + eps)
            epoch_loss /= n
            if epoch_loss < best - self.tol:
                best = epoch_loss
                stale = 0
            else:
                stale += 1
                if stale >= self.patience:
                    self.converged = True
                    break
        if not self.converged:
            warnings.warn(
                "MLP hit the epoch cap without a training-loss plateau",
                RuntimeWarning,
            )
        self.params_ = params
        return self

    def score_many(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        if X.shape[1] != self.n_features_:
            raise ValueError(f"expected {self.n_features_} features, got {X.shape[1]}")
        _, _, z2 = forward(self.params_, X, self.activation)
        return _sigmoid(z2)

    def to_dict(self) -> dict:
        return {
            "hidden": self.hidden,
            "activation": self.activation,
            "optimizer": self.optimizer,
            "learning_rate": self.learning_rate,
            "batch_size": self.batch_size,
            "max_epochs": self.max_epochs,
            "patience": self.patience,
            "tol": self.tol,
            "seed": self.seed,
            "converged": self.converged,
            "n_features": self.n_features_,
            "params": {k: v.tolist() for k, v in self.params_.items()},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "MLP":
        model = cls(
            hidden=doc["hidden"],
            activation=doc["activation"],
            optimizer=doc["optimizer"],
            learning_rate=doc["learning_rate"],
            batch_size=doc["batch_size"],
            max_epochs=doc["max_epochs"],
            patience=doc["patience"],
            tol=doc["tol"],
            seed=doc["seed"],
        )
        model.converged = doc["converged"]
        model.n_features_ = doc["n_features"]
        model.params_ = {k: np.asarray(v, dtype=np.float64) for k, v in doc["params"].items()}
        return model
