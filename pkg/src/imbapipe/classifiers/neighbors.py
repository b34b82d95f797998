"""k-nearest-neighbor voting with exact Euclidean search."""

from __future__ import annotations

import numpy as np

from ..resampling import squared_distances
from ..utils import as_float_matrix, as_label_vector


class KNeighbors:
    """Majority vote among the k nearest training rows.

    Brute-force distances, computed in query chunks to bound memory.
    Distance ties resolve to the lowest training-row index via a stable
    sort, and the returned score is the positive-neighbor fraction.
    """

    def __init__(self, k: int = 5):
        if k < 1:
            raise ValueError("k must be >= 1")
        self.k = k
        self.X_: np.ndarray | None = None
        self.y_: np.ndarray | None = None

    def fit(self, X, y) -> "KNeighbors":
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0])
        if self.k > X.shape[0]:
            raise ValueError(f"k={self.k} exceeds {X.shape[0]} training rows")
        self.X_ = X.copy()
        self.y_ = y.copy()
        return self

    def score_many(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        if X.shape[1] != self.X_.shape[1]:
            raise ValueError(f"expected {self.X_.shape[1]} features, got {X.shape[1]}")
        n_train = self.X_.shape[0]
        k = self.k
        out = np.empty(X.shape[0])
        chunk = max(1, 4_000_000 // max(n_train, 1))
        for start in range(0, X.shape[0], chunk):
            stop = min(start + chunk, X.shape[0])
            D = squared_distances(X[start:stop], self.X_)
            if k >= n_train:
                out[start:stop] = self.y_.mean()
                continue
            rows = np.arange(stop - start)[:, None]
            part = np.argpartition(D, k - 1, axis=1)[:, :k]
            dk = D[rows, part].max(axis=1)
            # Of the k slots, those strictly inside the k-th distance are
            # unambiguous; slots tied at the boundary go to the lowest
            # training index.
            less = D < dk[:, None]
            n_less = less.sum(axis=1)
            pos = (less & (self.y_ == 1)).sum(axis=1).astype(np.float64)
            for r in np.flatnonzero(n_less < k):
                need = k - int(n_less[r])
                tied = np.flatnonzero(D[r] == dk[r])[:need]
                pos[r] += int(self.y_[tied].sum())
            out[start:stop] = pos / k
        return out

    def to_dict(self) -> dict:
        return {"k": self.k, "X": self.X_.tolist(), "y": self.y_.tolist()}

    @classmethod
    def from_dict(cls, doc: dict) -> "KNeighbors":
        model = cls(k=doc["k"])
        model.X_ = np.asarray(doc["X"], dtype=np.float64)
        model.y_ = np.asarray(doc["y"], dtype=np.int64)
        return model
