"""Class-balance resamplers for binary data.

Eight strategies share one entry point, :func:`resample`:

* ``none``                    identity
* ``cluster_centroids``       replace the majority class with k-means centroids
* ``cluster_representatives`` like above but keep the real point nearest each centroid
* ``smote``                   interpolated synthetic minority samples
* ``adasyn``                  SMOTE with density-weighted allocation
* ``prowsyn``                 SMOTE within proximity levels, weights decaying by level
* ``smote_tomek``             SMOTE followed by Tomek-link pair removal
* ``smote_ipf``               SMOTE followed by iterative ensemble filtering

All synthetic generation is convex interpolation between two real minority
rows, so every synthetic point lies on a segment between two originals.
Everything is deterministic given (data, spec, seed).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .utils import as_float_matrix, as_label_vector, rng_for, stratified_assignment

KINDS = (
    "none",
    "cluster_centroids",
    "cluster_representatives",
    "smote",
    "adasyn",
    "prowsyn",
    "smote_tomek",
    "smote_ipf",
)

# Short tokens used in pipeline identifiers, e.g. "GB-SMOTE_IPF/35".
KIND_TOKENS = {
    "none": "None",
    "cluster_centroids": "ClusterCentroids",
    "cluster_representatives": "ClusterRepresentatives",
    "smote": "SMOTE",
    "adasyn": "ADASYN",
    "prowsyn": "ProWSyn",
    "smote_tomek": "SMOTE_TomekLinks",
    "smote_ipf": "SMOTE_IPF",
}

# Human-facing names used in report tables.
KIND_DISPLAY = {
    "none": "None",
    "cluster_centroids": "Cluster Centroids",
    "cluster_representatives": "Cluster Representatives",
    "smote": "SMOTE",
    "adasyn": "ADASYN",
    "prowsyn": "ProWSyn",
    "smote_tomek": "SMOTE-TomekLinks",
    "smote_ipf": "SMOTE-IPF",
}


class ResamplingError(ValueError):
    pass


@dataclass(frozen=True)
class ResamplerSpec:
    """Which resampler to run and with what parameters.

    ``k_neighbors`` feeds every neighbor-based step and is clamped to the
    available minority count minus one at run time.  ``levels`` and ``theta``
    apply to prowsyn; ``partitions``, ``stop_rounds``, ``stop_fraction`` and
    ``filter_depth`` apply to smote_ipf.
    """

    kind: str = "none"
    k_neighbors: int = 5
    levels: int = 5
    theta: float = 1.0
    partitions: int = 9
    stop_rounds: int = 3
    stop_fraction: float = 0.01
    filter_depth: int = 5

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ResamplingError(f"unknown resampler kind {self.kind!r}; choose from {KINDS}")
        if self.k_neighbors < 1:
            raise ResamplingError("k_neighbors must be >= 1")
        if self.levels < 1:
            raise ResamplingError("levels must be >= 1")
        if not self.theta > 0:
            raise ResamplingError("theta must be > 0")
        if self.partitions < 2:
            raise ResamplingError("partitions must be >= 2")
        if self.stop_rounds < 1:
            raise ResamplingError("stop_rounds must be >= 1")
        if not 0 < self.stop_fraction < 1:
            raise ResamplingError("stop_fraction must be in (0, 1)")
        if self.filter_depth < 1:
            raise ResamplingError("filter_depth must be >= 1")

    @property
    def token(self) -> str:
        return KIND_TOKENS[self.kind]

    @property
    def display(self) -> str:
        return KIND_DISPLAY[self.kind]

    def key(self) -> str:
        """Canonical string for caching and seed derivation."""
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "k_neighbors": self.k_neighbors,
            "levels": self.levels,
            "theta": self.theta,
            "partitions": self.partitions,
            "stop_rounds": self.stop_rounds,
            "stop_fraction": self.stop_fraction,
            "filter_depth": self.filter_depth,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ResamplerSpec":
        return cls(**doc)


@dataclass(frozen=True)
class ResampledSet:
    """Resampler output: rows, binary target, and per-row synthetic flags."""

    features: np.ndarray
    target: np.ndarray
    synthetic: np.ndarray

    def __post_init__(self):
        for attr in ("features", "target", "synthetic"):
            arr = np.asarray(getattr(self, attr))
            arr.setflags(write=False)
            object.__setattr__(self, attr, arr)
        if self.features.shape[0] != self.target.shape[0] != self.synthetic.shape[0]:
            raise ResamplingError("features, target and synthetic lengths differ")

    def class_counts(self) -> tuple[int, int]:
        pos = int(self.target.sum())
        return len(self.target) - pos, pos


@dataclass(frozen=True)
class KMeansModel:
    centroids: np.ndarray
    labels: np.ndarray
    inertia: float
    n_iter: int


def squared_distances(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Pairwise squared Euclidean distances, clipped at zero."""
    aa = np.einsum("ij,ij->i", A, A)
    bb = np.einsum("ij,ij->i", B, B)
    D = aa[:, None] + bb[None, :] - 2.0 * (A @ B.T)
    return np.maximum(D, 0.0)


def _knn_indices(points: np.ndarray, queries: np.ndarray, k: int, exclude_self: bool) -> np.ndarray:
    """Indices (into ``points``) of the k nearest points per query row.

    Exact brute-force search; ties resolve to the lowest index via a stable
    sort.  ``exclude_self`` assumes queries and points are the same array.
    """
    D = squared_distances(queries, points)
    if exclude_self:
        np.fill_diagonal(D, np.inf)
    order = np.argsort(D, axis=1, kind="stable")
    return order[:, :k]


def kmeans(X: np.ndarray, k: int, seed: int, max_iter: int = 300, tol: float = 1e-6) -> KMeansModel:
    """Lloyd's algorithm from a k-means++ start.

    Stops when the largest centroid shift falls below ``tol`` or after
    ``max_iter`` rounds.  Ties in assignment go to the lowest centroid
    index; an emptied cluster is re-seeded with the point currently
    farthest from its own centroid.
    """
    X = as_float_matrix(X)
    n = X.shape[0]
    if not 1 <= k <= n:
        raise ResamplingError(f"k must be in [1, {n}], got {k}")
    rng = np.random.default_rng(seed)

    centroids = np.empty((k, X.shape[1]))
    first = int(rng.integers(n))
    centroids[0] = X[first]
    closest = squared_distances(X, centroids[:1])[:, 0]
    for j in range(1, k):
        total = closest.sum()
        if total <= 0:
            # All remaining points coincide with chosen centroids.
            pick = int(rng.integers(n))
        else:
            r = rng.random() * total
            pick = int(np.searchsorted(np.cumsum(closest), r, side="right"))
            pick = min(pick, n - 1)
        centroids[j] = X[pick]
        closest = np.minimum(closest, squared_distances(X, centroids[j : j + 1])[:, 0])

    labels = np.zeros(n, dtype=np.int64)
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        D = squared_distances(X, centroids)
        labels = D.argmin(axis=1)
        new_centroids = centroids.copy()
        counts = np.bincount(labels, minlength=k)
        for j in range(k):
            if counts[j] > 0:
                new_centroids[j] = X[labels == j].mean(axis=0)
        empties = np.flatnonzero(counts == 0)
        if empties.size:
            own = D[np.arange(n), labels].copy()
            for j in empties:
                far = int(own.argmax())
                new_centroids[j] = X[far]
                labels[far] = j
                own[far] = -1.0
        shift = np.sqrt(((new_centroids - centroids) ** 2).sum(axis=1)).max()
        centroids = new_centroids
        if shift < tol:
            break

    D = squared_distances(X, centroids)
    labels = D.argmin(axis=1)
    inertia = float(D[np.arange(n), labels].sum())
    return KMeansModel(centroids=centroids, labels=labels, inertia=inertia, n_iter=n_iter)


def cluster_representatives(X: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Indices of the real point nearest each k-means centroid.

    The search is restricted to each cluster's own members, so the returned
    indices are distinct; ties resolve to the lowest row index.
    """
    X = as_float_matrix(X)
    model = kmeans(X, k, seed)
    reps = np.empty(k, dtype=np.int64)
    for j in range(k):
        members = np.flatnonzero(model.labels == j)
        d = squared_distances(X[members], model.centroids[j : j + 1])[:, 0]
        reps[j] = members[int(d.argmin())]
    return reps


def tomek_links(X: np.ndarray, y: np.ndarray) -> np.ndarray:
    """All Tomek links as an array of index pairs (i, j) with i < j.

    A cross-class pair is a link when no third example sits strictly closer
    to either endpoint than the endpoints sit to each other.  Equivalently
    each endpoint attains the other's nearest-neighbor distance, which is
    what the chunked scan below checks.
    """
    X = as_float_matrix(X)
    y = as_label_vector(y, X.shape[0])
    n = X.shape[0]
    if n < 2:
        return np.empty((0, 2), dtype=np.int64)

    chunk = max(1, min(n, 8_000_000 // max(n, 1)))
    d1 = np.full(n, np.inf)
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        D = squared_distances(X[start:stop], X)
        D[np.arange(stop - start), np.arange(start, stop)] = np.inf
        d1[start:stop] = D.min(axis=1)

    pairs: list[tuple[int, int]] = []
    for start in range(0, n, chunk):
        stop = min(start + chunk, n)
        D = squared_distances(X[start:stop], X)
        D[np.arange(stop - start), np.arange(start, stop)] = np.inf
        hit = (D == d1[start:stop, None]) & (D == d1[None, :])
        hit &= y[start:stop, None] != y[None, :]
        rows, cols = np.nonzero(hit)
        for r, c in zip(rows, cols):
            i, j = start + int(r), int(c)
            if i < j:
                pairs.append((i, j))
    if not pairs:
        return np.empty((0, 2), dtype=np.int64)
    out = np.array(sorted(pairs), dtype=np.int64)
    return out


def _largest_remainder(weights: np.ndarray, total: int) -> np.ndarray:
    """Integer allocation of ``total`` proportional to ``weights``.

    Floors the exact quotas, then hands the leftover units to the largest
    fractional remainders; remainder ties break toward the lowest index.
    """
    weights = np.asarray(weights, dtype=np.float64)
    if total == 0:
        return np.zeros(len(weights), dtype=np.int64)
    quotas = weights / weights.sum() * total
    counts = np.floor(quotas).astype(np.int64)
    leftover = total - int(counts.sum())
    if leftover > 0:
        order = np.argsort(-(quotas - counts), kind="stable")
        counts[order[:leftover]] += 1
    return counts


def _split_classes(X: np.ndarray, y: np.ndarray):
    """(minority label, minority rows, majority rows). Ties pick label 1."""
    pos = int(y.sum())
    neg = len(y) - pos
    minority_label = 1 if pos <= neg else 0
    X_min = X[y == minority_label]
    X_maj = X[y != minority_label]
    return minority_label, X_min, X_maj


def _interpolate(
    X_min: np.ndarray,
    counts: np.ndarray,
    neighbor_idx: np.ndarray,
    rng: np.random.Generator,
) -> np.ndarray:
    """SMOTE's generation step.

    For each minority row i, draw ``counts[i]`` synthetics: pick one of its
    precomputed neighbors z and emit x_i + g * (x_z - x_i) with g ~ U[0, 1].
    Rows are processed in ascending index order so the draw sequence is
    reproducible.
    """
    total = int(counts.sum())
    out = np.empty((total, X_min.shape[1]))
    pos = 0
    k = neighbor_idx.shape[1]
    for i in np.flatnonzero(counts > 0):
        c = int(counts[i])
        picks = neighbor_idx[i][rng.integers(0, k, size=c)]
        gaps = rng.random(c)
        out[pos : pos + c] = X_min[i] + gaps[:, None] * (X_min[picks] - X_min[i])
        pos += c
    return out


def _smote_synthetics(
    X_min: np.ndarray, k_neighbors: int, total: int, rng: np.random.Generator
) -> np.ndarray:
    """Uniform-allocation SMOTE synthetics for one minority set."""
    m = len(X_min)
    if m < 2:
        raise ResamplingError("SMOTE needs at least 2 minority samples")
    k = min(k_neighbors, m - 1)
    counts = _largest_remainder(np.ones(m), total)
    nn = _knn_indices(X_min, X_min, k, exclude_self=True)
    return _interpolate(X_min, counts, nn, rng)


def _assemble(X, y, syn_X, minority_label):
    """Originals in original order, then synthetic minority rows."""
    if len(syn_X) == 0:
        return ResampledSet(X.copy(), y.copy(), np.zeros(len(y), dtype=bool))
    feats = np.vstack([X, syn_X])
    target = np.concatenate([y, np.full(len(syn_X), minority_label, dtype=y.dtype)])
    flags = np.concatenate([np.zeros(len(y), dtype=bool), np.ones(len(syn_X), dtype=bool)])
    return ResampledSet(feats, target, flags)


def _smote(X, y, spec: ResamplerSpec, rng) -> ResampledSet:
    minority_label, X_min, X_maj = _split_classes(X, y)
    total = len(X_maj) - len(X_min)
    if total == 0:
        return _assemble(X, y, np.empty((0, X.shape[1])), minority_label)
    syn = _smote_synthetics(X_min, spec.k_neighbors, total, rng)
    return _assemble(X, y, syn, minority_label)


def _adasyn(X, y, spec: ResamplerSpec, rng) -> ResampledSet:
    minority_label, X_min, X_maj = _split_classes(X, y)
    m = len(X_min)
    total = len(X_maj) - m
    if total == 0:
        return _assemble(X, y, np.empty((0, X.shape[1])), minority_label)
    if m < 2:
        raise ResamplingError("ADASYN needs at least 2 minority samples")

    k = min(spec.k_neighbors, len(X) - 1)
    min_rows = np.flatnonzero(y == minority_label)
    # Queries are rows of X, so search k+1 and drop each query's own index.
    nn_all = _knn_indices(X, X[min_rows], k + 1, exclude_self=False)
    ratios = np.empty(m)
    for i, row in enumerate(min_rows):
        neigh = [j for j in nn_all[i] if j != row][:k]
        ratios[i] = np.sum(y[neigh] != minority_label) / k

    if ratios.sum() == 0:
        warnings.warn(
            "ADASYN found no majority neighbors around any minority sample; "
            "falling back to uniform SMOTE allocation",
            RuntimeWarning,
        )
        counts = _largest_remainder(np.ones(m), total)
    else:
        counts = _largest_remainder(ratios / ratios.sum(), total)

    kk = min(spec.k_neighbors, m - 1)
    nn_min = _knn_indices(X_min, X_min, kk, exclude_self=True)
    syn = _interpolate(X_min, counts, nn_min, rng)
    return _assemble(X, y, syn, minority_label)


def prowsyn_levels(X_min: np.ndarray, X_maj: np.ndarray, k_neighbors: int, levels: int) -> np.ndarray:
    """Proximity level (1-based) of every minority row.

    Level 1 holds the minority points appearing among the k nearest minority
    neighbors of any majority point; those are peeled off and the search
    repeats.  Whatever remains after ``levels - 1`` rounds lands in the
    final level.
    """
    m = len(X_min)
    out = np.zeros(m, dtype=np.int64)
    remaining = np.arange(m)
    for level in range(1, levels):
        if remaining.size == 0:
            break
        kk = min(k_neighbors, remaining.size)
        nn = _knn_indices(X_min[remaining], X_maj, kk, exclude_self=False)
        picked = np.unique(nn)
        out[remaining[picked]] = level
        remaining = np.delete(remaining, picked)
    out[remaining] = levels
    return out


def _prowsyn(X, y, spec: ResamplerSpec, rng) -> ResampledSet:
    minority_label, X_min, X_maj = _split_classes(X, y)
    m = len(X_min)
    total = len(X_maj) - m
    if total == 0:
        return _assemble(X, y, np.empty((0, X.shape[1])), minority_label)
    if m < 2:
        raise ResamplingError("ProWSyn needs at least 2 minority samples")

    level_of = prowsyn_levels(X_min, X_maj, spec.k_neighbors, spec.levels)
    level_ids = np.unique(level_of)
    weights = np.array(
        [
            np.exp(-spec.theta * (lvl - 1)) if np.sum(level_of == lvl) >= 2 else 0.0
            for lvl in level_ids
        ]
    )
    if weights.sum() == 0:
        warnings.warn(
            "every ProWSyn level has fewer than 2 points; "
            "treating all minority samples as one level",
            RuntimeWarning,
        )
        syn = _smote_synthetics(X_min, spec.k_neighbors, total, rng)
        return _assemble(X, y, syn, minority_label)

    per_level = _largest_remainder(weights / weights.sum(), total)
    chunks = []
    for lvl, quota in zip(level_ids, per_level):
        if quota == 0:
            continue
        members = np.flatnonzero(level_of == lvl)
        chunks.append(_smote_synthetics(X_min[members], spec.k_neighbors, int(quota), rng))
    syn = np.vstack(chunks) if chunks else np.empty((0, X.shape[1]))
    return _assemble(X, y, syn, minority_label)


def _cluster_downsample(X, y, spec: ResamplerSpec, rng, use_centroids: bool) -> ResampledSet:
    minority_label, X_min, X_maj = _split_classes(X, y)
    k = len(X_min)
    if k == len(X_maj):
        return ResampledSet(X.copy(), y.copy(), np.zeros(len(y), dtype=bool))
    if k < 1:
        raise ResamplingError("undersampling needs at least 1 minority sample")
    seed = int(rng.integers(2**63 - 1))
    majority_label = 1 - minority_label
    if use_centroids:
        model = kmeans(X_maj, k, seed)
        maj_rows = model.centroids
        maj_flags = np.ones(k, dtype=bool)
    else:
        reps = cluster_representatives(X_maj, k, seed)
        maj_rows = X_maj[reps]
        maj_flags = np.zeros(k, dtype=bool)
    feats = np.vstack([X_min, maj_rows])
    target = np.concatenate(
        [
            np.full(k, minority_label, dtype=y.dtype),
            np.full(k, majority_label, dtype=y.dtype),
        ]
    )
    flags = np.concatenate([np.zeros(k, dtype=bool), maj_flags])
    return ResampledSet(feats, target, flags)


def _smote_tomek(X, y, spec: ResamplerSpec, rng) -> ResampledSet:
    base = _smote(X, y, spec, rng)
    links = tomek_links(base.features, base.target)
    if links.size == 0:
        return base
    drop = np.unique(links.ravel())
    keep = np.setdiff1d(np.arange(len(base.target)), drop)
    return ResampledSet(base.features[keep], base.target[keep], base.synthetic[keep])


def _smote_ipf(X, y, spec: ResamplerSpec, rng) -> ResampledSet:
    from .classifiers.tree import DecisionTree

    base = _smote(X, y, spec, rng)
    feats, target, flags = base.features.copy(), base.target.copy(), base.synthetic.copy()
    streak = 0
    while streak < spec.stop_rounds:
        groups = stratified_assignment(target, spec.partitions, rng)
        votes = np.zeros(len(target), dtype=np.int64)
        for g in range(spec.partitions):
            members = np.flatnonzero(groups == g)
            tree_seed = int(rng.integers(2**63 - 1))
            tree = DecisionTree(
                criterion="gini", splitter="best", max_depth=spec.filter_depth, seed=tree_seed
            )
            tree.fit(feats[members], target[members])
            votes += (tree.predict_many(feats) != target).astype(np.int64)
        to_remove = np.flatnonzero(votes > spec.partitions / 2)
        keep = np.setdiff1d(np.arange(len(target)), to_remove)
        kept_target = target[keep]
        if len(np.unique(kept_target)) < 2 or min(
            int(kept_target.sum()), len(kept_target) - int(kept_target.sum())
        ) < 2:
            warnings.warn(
                "noise filtering would nearly empty a class; stopping early",
                RuntimeWarning,
            )
            break
        feats, target, flags = feats[keep], target[keep], flags[keep]
        if len(to_remove) < spec.stop_fraction * len(target):
            streak += 1
        else:
            streak = 0
    return ResampledSet(feats, target, flags)


def resample(spec: ResamplerSpec, X: np.ndarray, y: np.ndarray, seed: int) -> ResampledSet:
    """Run one resampler over a binary dataset.

    Balancing kinds return equal class counts; the cleaning stages of
    smote_tomek and smote_ipf may then remove rows from either class.
    """
    X = as_float_matrix(X)
    y = as_label_vector(y, X.shape[0])
    if len(np.unique(y)) < 2:
        raise ResamplingError("resampling needs both classes present")
    rng = rng_for(seed, "resample", spec.key())
    if spec.kind == "none":
        return ResampledSet(X.copy(), y.copy(), np.zeros(len(y), dtype=bool))
    if spec.kind == "cluster_centroids":
        return _cluster_downsample(X, y, spec, rng, use_centroids=True)
    if spec.kind == "cluster_representatives":
        return _cluster_downsample(X, y, spec, rng, use_centroids=False)
    if spec.kind == "smote":
        return _smote(X, y, spec, rng)
    if spec.kind == "adasyn":
        return _adasyn(X, y, spec, rng)
    if spec.kind == "prowsyn":
        return _prowsyn(X, y, spec, rng)
    if spec.kind == "smote_tomek":
        return _smote_tomek(X, y, spec, rng)
    if spec.kind == "smote_ipf":
        return _smote_ipf(X, y, spec, rng)
    raise ResamplingError(f"unhandled kind {spec.kind!r}")
