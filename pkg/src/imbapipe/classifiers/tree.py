"""Binary decision trees grown by recursive splitting.

:class:`DecisionTree` is the classification tree used directly and as the
weak learner inside the ensemble families.  :class:`GradientTree` is the
regression tree used by gradient boosting; it scores splits with the usual
second-order gain and writes Newton-step values into its leaves.

Split selection scans features in ascending index order and thresholds in
ascending value order, accepting only strict improvements, so equal-quality
candidates resolve to the lowest feature index and then the lowest
threshold.
"""

from __future__ import annotations

import numpy as np

from ..utils import as_float_matrix, as_label_vector

_TINY = 1e-12


def gini(counts) -> float:
    """Gini impurity of one node given per-class counts."""
    c = np.asarray(counts, dtype=np.float64)
    total = c.sum()
    if total <= 0:
        return 0.0
    p = c / total
    return float(1.0 - np.sum(p * p))


def entropy(counts) -> float:
    """Shannon entropy in bits of one node given per-class counts."""
    c = np.asarray(counts, dtype=np.float64)
    total = c.sum()
    if total <= 0:
        return 0.0
    p = c[c > 0] / total
    return float(-np.sum(p * np.log2(p)))


def node_impurity(criterion: str, counts) -> float:
    if criterion == "gini":
        return gini(counts)
    if criterion == "entropy":
        return entropy(counts)
    raise ValueError(f"unknown criterion {criterion!r}")


def split_quality(criterion: str, left_counts, right_counts) -> float:
    """Size-weighted child impurity; lower is better, 0 for a pure split."""
    left = np.asarray(left_counts, dtype=np.float64)
    right = np.asarray(right_counts, dtype=np.float64)
    nl, nr = left.sum(), right.sum()
    total = nl + nr
    if total <= 0:
        return 0.0
    return float(
        (nl * node_impurity(criterion, left) + nr * node_impurity(criterion, right)) / total
    )


def _impurity_curve(criterion: str, pos: np.ndarray, tot: np.ndarray) -> np.ndarray:
    """Vectorized impurity for many (weighted) count pairs."""
    safe = np.maximum(tot, _TINY)
    p1 = np.clip(pos / safe, 0.0, 1.0)
    p0 = 1.0 - p1
    if criterion == "gini":
        out = 1.0 - p1 * p1 - p0 * p0
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            t1 = np.where(p1 > 0, p1 * np.log2(p1), 0.0)
            t0 = np.where(p0 > 0, p0 * np.log2(p0), 0.0)
        out = -(t1 + t0)
    return np.where(tot > 0, out, 0.0)


class DecisionTree:
    """CART-style classifier for binary targets.

    Supports sample weights, a depth cap, per-node feature subsampling for
    forests, and two splitters: ``best`` scans every midpoint between
    consecutive distinct values, ``random`` draws one uniform threshold per
    candidate feature and keeps the best of those.
    """

    def __init__(
        self,
        criterion: str = "gini",
        splitter: str = "best",
        max_depth: int | None = None,
        min_samples_split: int = 2,
        max_features: int | None = None,
        seed: int = 0,
    ):
        if criterion not in ("gini", "entropy"):
            raise ValueError(f"unknown criterion {criterion!r}")
        if splitter not in ("best", "random"):
            raise ValueError(f"unknown splitter {splitter!r}")
        self.criterion = criterion
        self.splitter = splitter
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.seed = seed
        # Flat node table: [feature, threshold, left, right, value].
        # feature == -1 marks a leaf whose value is the weighted positive fraction.
        self.nodes: list[list[float]] = []
        self.n_features_: int | None = None

    def fit(self, X, y, sample_weight=None) -> "DecisionTree":
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0])
        n, d = X.shape
        w = (
            np.full(n, 1.0 / n)
            if sample_weight is None
            else np.asarray(sample_weight, dtype=np.float64)
        )
        self.n_features_ = d
        self.nodes = []
        rng = np.random.default_rng(self.seed)

        stack: list[tuple[np.ndarray, int, int, int]] = [(np.arange(n), 0, -1, 0)]
        while stack:
            idx, depth, parent, side = stack.pop()
            node_id = len(self.nodes)
            if parent >= 0:
                self.nodes[parent][2 + side] = node_id
            wn = w[idx]
            pos_w = float(wn[y[idx] == 1].sum())
            tot_w = float(wn.sum())
            value = pos_w / tot_w if tot_w > 0 else 0.0
            pure = pos_w <= _TINY or (tot_w - pos_w) <= _TINY
            depth_hit = self.max_depth is not None and depth >= self.max_depth
            if pure or depth_hit or len(idx) < self.min_samples_split:
                self.nodes.append([-1, 0.0, -1, -1, value])
                continue
            split = self._find_split(X, y, w, idx, rng)
            if split is None:
                self.nodes.append([-1, 0.0, -1, -1, value])
                continue
            feature, threshold = split
            mask = X[idx, feature] <= threshold
            self.nodes.append([feature, threshold, -1, -1, value])
            # Push right first so the left child is grown (and numbered) first.
            stack.append((idx[~mask], depth + 1, node_id, 1))
            stack.append((idx[mask], depth + 1, node_id, 0))
        return self

    def _candidate_features(self, d: int, rng: np.random.Generator) -> np.ndarray:
        if self.max_features is None or self.max_features >= d:
            return np.arange(d)
        return np.sort(rng.permutation(d)[: self.max_features])

    def _find_split(self, X, y, w, idx, rng):
        Xn = X[idx]
        pos = w[idx] * (y[idx] == 1)
        wn = w[idx]
        total_w = wn.sum()
        total_pos = pos.sum()
        best_q = np.inf
        best = None
        for f in self._candidate_features(X.shape[1], rng):
            xs = Xn[:, f]
            if self.splitter == "best":
                order = np.argsort(xs, kind="stable")
                xo = xs[order]
                if xo[0] == xo[-1]:
                    continue
                cw = np.cumsum(wn[order])
                cp = np.cumsum(pos[order])
                cut = np.flatnonzero(xo[:-1] < xo[1:])
                if cut.size == 0:
                    continue
                lw, lp = cw[cut], cp[cut]
                rw, rp = total_w - lw, total_pos - lp
                q = (
                    lw * _impurity_curve(self.criterion, lp, lw)
                    + rw * _impurity_curve(self.criterion, rp, rw)
                ) / max(total_w, _TINY)
                j = int(np.argmin(q))
                if q[j] < best_q:
                    best_q = float(q[j])
                    best = (int(f), float((xo[cut[j]] + xo[cut[j] + 1]) / 2.0))
            else:
                lo, hi = xs.min(), xs.max()
                if lo == hi:
                    continue
                thr = float(rng.uniform(lo, hi))
                mask = xs <= thr
                if not mask.any() or mask.all():
                    continue
                lw = float(wn[mask].sum())
                lp = float(pos[mask].sum())
                rw, rp = total_w - lw, total_pos - lp
                q = (
                    lw * _impurity_curve(self.criterion, np.array([lp]), np.array([lw]))[0]
                    + rw * _impurity_curve(self.criterion, np.array([rp]), np.array([rw]))[0]
                ) / max(total_w, _TINY)
                if q < best_q:
                    best_q = float(q)
                    best = (int(f), thr)
        return best

    def score_many(self, X) -> np.ndarray:
        """Weighted positive-class fraction of the leaf each row lands in."""
        X = as_float_matrix(X)
        if X.shape[1] != self.n_features_:
            raise ValueError(f"expected {self.n_features_} features, got {X.shape[1]}")
        out = np.empty(X.shape[0])
        table = self.nodes
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            nid, idx = stack.pop()
            if idx.size == 0:
                continue
            feature, threshold, left, right, value = table[nid]
            if feature < 0:
                out[idx] = value
                continue
            mask = X[idx, int(feature)] <= threshold
            stack.append((int(left), idx[mask]))
            stack.append((int(right), idx[~mask]))
        return out

    def predict_many(self, X) -> np.ndarray:
        return (self.score_many(X) > 0.5).astype(np.int64)

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion,
            "splitter": self.splitter,
            "max_depth": self.max_depth,
            "min_samples_split": self.min_samples_split,
            "max_features": self.max_features,
            "seed": self.seed,
            "n_features": self.n_features_,
            "nodes": [list(node) for node in self.nodes],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "DecisionTree":
        tree = cls(
            criterion=doc["criterion"],
            splitter=doc["splitter"],
            max_depth=doc["max_depth"],
            min_samples_split=doc["min_samples_split"],
            max_features=doc["max_features"],
            seed=doc["seed"],
        )
        tree.n_features_ = doc["n_features"]
        tree.nodes = [list(node) for node in doc["nodes"]]
        return tree


class GradientTree:
    """Regression tree over gradient/hessian pairs for boosting rounds.

    Split gain is the standard second-order expression
    ``GL^2/(HL+lam) + GR^2/(HR+lam) - G^2/(H+lam)``; leaves hold the damped
    Newton step ``-G/(H+lam)`` clipped to a fixed magnitude so early rounds
    on near-pure nodes cannot blow up the raw scores.
    """

    LEAF_CLIP = 10.0

    def __init__(self, max_depth: int = 3, reg_lambda: float = 1.0, min_gain: float = 1e-12):
        self.max_depth = max_depth
        self.reg_lambda = reg_lambda
        self.min_gain = min_gain
        self.nodes: list[list[float]] = []
        self.n_features_: int | None = None

    def fit(self, X, grad, hess) -> "GradientTree":
        X = as_float_matrix(X)
        g = np.asarray(grad, dtype=np.float64)
        h = np.asarray(hess, dtype=np.float64)
        self.n_features_ = X.shape[1]
        self.nodes = []
        lam = self.reg_lambda

        stack: list[tuple[np.ndarray, int, int, int]] = [(np.arange(X.shape[0]), 0, -1, 0)]
        while stack:
            idx, depth, parent, side = stack.pop()
            node_id = len(self.nodes)
            if parent >= 0:
                self.nodes[parent][2 + side] = node_id
            G = float(g[idx].sum())
            H = float(h[idx].sum())
            value = float(np.clip(-G / (H + lam), -self.LEAF_CLIP, self.LEAF_CLIP))
            if depth >= self.max_depth or len(idx) < 2:
                self.nodes.append([-1, 0.0, -1, -1, value])
                continue
            split = self._find_split(X, g, h, idx, G, H)
            if split is None:
                self.nodes.append([-1, 0.0, -1, -1, value])
                continue
            feature, threshold = split
            mask = X[idx, feature] <= threshold
            self.nodes.append([feature, threshold, -1, -1, value])
            stack.append((idx[~mask], depth + 1, node_id, 1))
            stack.append((idx[mask], depth + 1, node_id, 0))
        return self

    def _find_split(self, X, g, h, idx, G, H):
        lam = self.reg_lambda
        parent_score = G * G / (H + lam)
        best_gain = self.min_gain
        best = None
        Xn = X[idx]
        gn = g[idx]
        hn = h[idx]
        for f in range(X.shape[1]):
            xs = Xn[:, f]
            order = np.argsort(xs, kind="stable")
            xo = xs[order]
            if xo[0] == xo[-1]:
                continue
            cg = np.cumsum(gn[order])
            ch = np.cumsum(hn[order])
            cut = np.flatnonzero(xo[:-1] < xo[1:])
            if cut.size == 0:
                continue
            GL, HL = cg[cut], ch[cut]
            GR, HR = G - GL, H - HL
            gain = GL * GL / (HL + lam) + GR * GR / (HR + lam) - parent_score
            j = int(np.argmax(gain))
            if gain[j] > best_gain:
                best_gain = float(gain[j])
                best = (int(f), float((xo[cut[j]] + xo[cut[j] + 1]) / 2.0))
        return best

    def predict_many(self, X) -> np.ndarray:
        X = as_float_matrix(X)
        out = np.empty(X.shape[0])
        stack = [(0, np.arange(X.shape[0]))]
        while stack:
            nid, idx = stack.pop()
            if idx.size == 0:
                continue
            feature, threshold, left, right, value = self.nodes[nid]
            if feature < 0:
                out[idx] = value
                continue
            mask = X[idx, int(feature)] <= threshold
            stack.append((int(left), idx[mask]))
            stack.append((int(right), idx[~mask]))
        return out

    def to_dict(self) -> dict:
        return {
            "max_depth": self.max_depth,
            "reg_lambda": self.reg_lambda,
            "min_gain": self.min_gain,
            "n_features": self.n_features_,
            "nodes": [list(node) for node in self.nodes],
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "GradientTree":
        tree = cls(
            max_depth=doc["max_depth"],
            reg_lambda=doc["reg_lambda"],
            min_gain=doc["min_gain"],
        )
        tree.n_features_ = doc["n_features"]
        tree.nodes = [list(node) for node in doc["nodes"]]
        return tree
