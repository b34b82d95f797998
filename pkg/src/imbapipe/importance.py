"""Permutation importance over cross-validation folds.

A feature matters if shuffling it on the held-out fold costs balanced
accuracy.  Drops are averaged over shuffles and folds in the data's
original feature space, so features the pipeline never selected come out
at zero; negative averages are floored before the drops are normalized to
percentages.  A small exact clustering then splits the percentages into
high / mid / low importance bands for reporting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .evaluation import (
    CvCache,
    EvaluationError,
    PipelineSpec,
    balanced_accuracy_score,
    fit_fold,
    stratified_kfold,
)
from .utils import as_float_matrix, as_label_vector, parallel_map, rng_for

GROUP_LABELS = ("high", "mid", "low")


@dataclass(frozen=True)
class ImportanceResult:
    pipeline: PipelineSpec
    feature_names: tuple[str, ...]
    raw_drops: np.ndarray
    percentages: np.ndarray
    groups: tuple[str, ...]
    permutations: int
    folds: int

    def ordered(self) -> list[tuple[str, float, float, str]]:
        """(name, drop, percent, group) rows sorted by descending percent."""
        order = np.argsort(-self.percentages, kind="stable")
        return [
            (
                self.feature_names[i],
                float(self.raw_drops[i]),
                float(self.percentages[i]),
                self.groups[i],
            )
            for i in order
        ]

    def to_dict(self) -> dict:
        return {
            "pipeline": self.pipeline.to_dict(),
            "features": [
                {
                    "name": self.feature_names[i],
                    "drop": float(self.raw_drops[i]),
                    "percent": float(self.percentages[i]),
                    "group": self.groups[i],
                }
                for i in range(len(self.feature_names))
            ],
            "permutations": self.permutations,
            "folds": self.folds,
        }


def _fold_drops(pipeline: PipelineSpec, cache: CvCache, fold: int, permutations: int) -> np.ndarray:
    model, cols = fit_fold(pipeline, cache, fold)
    _, _, Xte, yte = cache.fold_matrices(fold)
    d = Xte.shape[1]
    selected = Xte[:, cols] if cols is not None else Xte
    baseline = balanced_accuracy_score(yte, model.predict_many(selected))
    drops = np.zeros(d)
    work = selected.copy()
    position = {c: i for i, c in enumerate(cols)} if cols is not None else None
    for j in range(d):
        if position is not None and j not in position:
            continue
        col = j if position is None else position[j]
        original = work[:, col].copy()
        rng = rng_for(cache.seed, "perm", fold, j)
        total = 0.0
        for _ in range(permutations):
            work[:, col] = original[rng.permutation(len(original))]
            total += baseline - balanced_accuracy_score(yte, model.predict_many(work))
        work[:, col] = original
        drops[j] = total / permutations
    return drops


def permutation_importance(
    pipeline: PipelineSpec,
    X,
    y,
    feature_names: Sequence[str] | None = None,
    folds: int = 10,
    seed: int = 0,
    permutations: int = 20,
    jobs: int = 1,
    cache: CvCache | None = None,
) -> ImportanceResult:
    """Mean permutation drop per feature, averaged over folds.

    Percentages are the non-negative drops scaled to sum to 100 (all zeros
    when nothing moved the score).
    """
    if permutations < 1:
        raise EvaluationError("permutations must be >= 1")
    X = as_float_matrix(X)
    y = as_label_vector(y, X.shape[0])
    if feature_names is None:
        feature_names = [f"f{j}" for j in range(X.shape[1])]
    if len(feature_names) != X.shape[1]:
        raise EvaluationError("feature_names length does not match data")
    if cache is None:
        cache = CvCache(X, y, stratified_kfold(y, folds, seed), seed)
    n_folds = len(cache.splits)
    cache.warm([(f, pipeline.resampler, pipeline.features) for f in range(n_folds)], jobs=jobs)
    per_fold = parallel_map(
        lambda fold: _fold_drops(pipeline, cache, fold, permutations),
        list(range(n_folds)),
        jobs,
    )
    raw = np.mean(per_fold, axis=0)
    clipped = np.maximum(raw, 0.0)
    total = clipped.sum()
    percent = clipped / total * 100.0 if total > 0 else np.zeros_like(clipped)
    return ImportanceResult(
        pipeline=pipeline,
        feature_names=tuple(feature_names),
        raw_drops=raw,
        percentages=percent,
        groups=tuple(group_importances(percent)),
        permutations=permutations,
        folds=n_folds,
    )


def _segment_costs(values: np.ndarray) -> np.ndarray:
    """cost[a, b] = within-segment sum of squared deviations for values[a..b]."""
    n = len(values)
    pref = np.concatenate([[0.0], np.cumsum(values)])
    pref2 = np.concatenate([[0.0], np.cumsum(values**2)])
    cost = np.zeros((n, n))
    for a in range(n):
        for b in range(a, n):
            s = pref[b + 1] - pref[a]
            s2 = pref2[b + 1] - pref2[a]
            cost[a, b] = s2 - s * s / (b - a + 1)
    return cost


def kmeans_1d(values, k: int) -> list[int]:
    """Exact minimum-variance clustering of sorted 1-D values into k segments.

    Returns the cluster index per input value (0 = smallest values).  Plain
    dynamic programming over segment boundaries; equal inputs always land
    in the same cluster because clusters are contiguous in sorted order.
    """
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="stable")
    sorted_vals = values[order]
    n = len(values)
    if not 1 <= k <= n:
        raise EvaluationError(f"k={k} out of range 1..{n}")
    cost = _segment_costs(sorted_vals)
    best = np.full((k + 1, n + 1), np.inf)
    cut = np.zeros((k + 1, n + 1), dtype=int)
    best[0, 0] = 0.0
    for parts in range(1, k + 1):
        for end in range(parts, n + 1):
            for start in range(parts - 1, end):
                c = best[parts - 1, start] + cost[start, end - 1]
                if c < best[parts, end]:
                    best[parts, end] = c
                    cut[parts, end] = start
    bounds = [n]
    for parts in range(k, 0, -1):
        bounds.append(cut[parts, bounds[-1]])
    bounds.reverse()
    assign_sorted = np.empty(n, dtype=int)
    for ci in range(k):
        assign_sorted[bounds[ci] : bounds[ci + 1]] = ci
    assign = np.empty(n, dtype=int)
    assign[order] = assign_sorted
    return assign.tolist()


def group_importances(percentages, n_groups: int = 3) -> list[str]:
    """Label each percentage high / mid / low by exact 1-D clustering.

    Clustering runs on the distinct values so equal percentages always
    share a band; with fewer distinct values than groups the top labels
    are used (a flat profile is all "high").
    """
    percentages = np.asarray(percentages, dtype=np.float64)
    distinct = np.unique(percentages)
    k = min(n_groups, len(distinct))
    assign = kmeans_1d(distinct, k)
    # cluster 0 holds the smallest values; "high" is always the top band
    # and "low" the bottom one (so two bands are high/low, one is high)
    if k == len(GROUP_LABELS):
        labels = GROUP_LABELS
    else:
        labels = (GROUP_LABELS[0], GROUP_LABELS[-1])[:k]
    value_group = {float(v): labels[k - 1 - g] for v, g in zip(distinct, assign)}
    return [value_group[float(v)] for v in percentages]
