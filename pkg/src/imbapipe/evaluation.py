"""Cross-validated evaluation: metrics, folds, grids, and feature selection.

The unit of evaluation is a :class:`PipelineSpec` (resampler + model + a
feature rule).  Per fold the pipeline selects features on the training
split, resamples the training split only, trains, and scores balanced
accuracy on the untouched test split.  Every random choice derives from the
caller's seed and the unit's content (fold index, resampler, columns), so
identical units give identical results no matter where or when they run.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.special import digamma

from .classifiers import ModelSpec, train_model
from .dataset import normalize_matrix
from .resampling import ResampledSet, ResamplerSpec, resample
from .utils import as_float_matrix, as_label_vector, derive_seed, parallel_map, rng_for


class EvaluationError(ValueError):
    pass


class AbsentClassError(EvaluationError):
    """A metric needed both classes but one side of the matrix is empty."""


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fn: int
    tn: int
    fp: int


def confusion(y_true, y_pred) -> ConfusionMatrix:
    t = np.asarray(y_true)
    p = np.asarray(y_pred)
    if t.shape != p.shape:
        raise EvaluationError(f"length mismatch: {t.shape} vs {p.shape}")
    return ConfusionMatrix(
        tp=int(np.sum((t == 1) & (p == 1))),
        fn=int(np.sum((t == 1) & (p == 0))),
        tn=int(np.sum((t == 0) & (p == 0))),
        fp=int(np.sum((t == 0) & (p == 1))),
    )


def balanced_accuracy(cm: ConfusionMatrix) -> float:
    """Mean of the two per-class recalls."""
    pos = cm.tp + cm.fn
    neg = cm.tn + cm.fp
    if pos == 0 or neg == 0:
        raise AbsentClassError(
            f"balanced accuracy undefined: {pos} positive and {neg} negative examples"
        )
    return 0.5 * (cm.tp / pos + cm.tn / neg)


def balanced_accuracy_score(y_true, y_pred) -> float:
    return balanced_accuracy(confusion(y_true, y_pred))


@dataclass(frozen=True)
class CvPlan:
    """How to cross-validate: fold count and repetition count."""

    folds: int = 10
    repetitions: int = 1

    def __post_init__(self):
        if self.folds < 2:
            raise EvaluationError("folds must be >= 2")
        if self.repetitions < 1:
            raise EvaluationError("repetitions must be >= 1")


def stratified_kfold(y, folds: int, seed: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Shuffled stratified folds; per-class fold counts differ by at most 1."""
    y = as_label_vector(np.asarray(y), name="y")
    from .utils import stratified_assignment

    counts = np.bincount(y, minlength=2)
    if counts.min() < folds:
        raise EvaluationError(
            f"every class needs at least {folds} rows; class counts are {counts.tolist()}"
        )
    assign = stratified_assignment(y, folds, rng_for(seed, "kfold", folds))
    splits = []
    for g in range(folds):
        test = np.flatnonzero(assign == g)
        train = np.flatnonzero(assign != g)
        splits.append((train, test))
    return splits


@dataclass(frozen=True)
class PipelineSpec:
    """Resampler + model + feature rule.

    ``features`` is ``None`` for all features, an int k for per-fold
    selection of the k best by mutual information, or an explicit tuple of
    column indices.
    """

    resampler: ResamplerSpec
    model: ModelSpec
    features: int | tuple[int, ...] | None = None

    def __post_init__(self):
        if isinstance(self.features, list):
            object.__setattr__(self, "features", tuple(self.features))

    def key(self) -> str:
        feat = list(self.features) if isinstance(self.features, tuple) else self.features
        return json.dumps(
            {"resampler": self.resampler.key(), "model": self.model.key(), "features": feat},
            sort_keys=True,
        )

    def identifier(self) -> str:
        """Readable pipeline id such as ``GB-SMOTE_IPF/35``."""
        name = self.model.family
        if self.resampler.kind != "none":
            name += f"-{self.resampler.token}"
        if isinstance(self.features, int):
            name += f"/{self.features}"
        elif isinstance(self.features, tuple):
            name += f"/{len(self.features)}"
        return name

    def to_dict(self) -> dict:
        feat = list(self.features) if isinstance(self.features, tuple) else self.features
        return {
            "resampler": self.resampler.to_dict(),
            "model": self.model.to_dict(),
            "features": feat,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PipelineSpec":
        feat = doc.get("features")
        if isinstance(feat, list):
            feat = tuple(feat)
        return cls(
            resampler=ResamplerSpec.from_dict(doc["resampler"]),
            model=ModelSpec.from_dict(doc["model"]),
            features=feat,
        )


@dataclass(frozen=True)
class PipelineScore:
    """Per-fold balanced accuracies with the summary stats reports use.

    ``error_pct`` is 100 times the population standard deviation of the
    fold scores; the verbose statistics carry the standard error and
    coefficient of variation alongside.
    """

    pipeline: PipelineSpec
    fold_scores: tuple[float, ...]

    @property
    def valid_scores(self) -> list[float]:
        return [s for s in self.fold_scores if not math.isnan(s)]

    @property
    def mean(self) -> float:
        scores = self.valid_scores
        return float(np.mean(scores)) if scores else float("nan")

    @property
    def error_pct(self) -> float:
        scores = self.valid_scores
        return float(100.0 * np.std(scores)) if scores else float("nan")

    def verbose_stats(self) -> dict:
        scores = self.valid_scores
        if not scores:
            return {"mean": float("nan"), "std": float("nan"), "stderr": float("nan"), "cv": float("nan")}
        mean = float(np.mean(scores))
        std = float(np.std(scores))
        return {
            "mean": mean,
            "std": std,
            "stderr": std / math.sqrt(len(scores)),
            "cv": std / mean if mean else float("nan"),
        }


class CvCache:
    """Per-run memo for fold-level work shared across pipelines.

    Keys are pure content (fold index, resampler spec, column tuple), so a
    hit is always exactly what a fresh computation would have produced.
    Populate with :meth:`warm` before running units on a thread pool.
    """

    def __init__(self, X, y, splits, seed: int, per_fold_normalize: bool = False):
        self.X = X
        self.y = y
        self.splits = splits
        self.seed = seed
        self.per_fold_normalize = per_fold_normalize
        self._norm: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        self._mi_order: dict[int, np.ndarray] = {}
        self._resampled: dict[tuple, ResampledSet] = {}

    def fold_matrices(self, fold: int):
        train_idx, test_idx = self.splits[fold]
        Xtr, Xte = self.X[train_idx], self.X[test_idx]
        if self.per_fold_normalize:
            if fold not in self._norm:
                self._norm[fold] = (Xtr.mean(axis=0), Xtr.std(axis=0))
            mean, std = self._norm[fold]
            Xtr = normalize_matrix(Xtr, mean, std)
            Xte = normalize_matrix(Xte, mean, std)
        return Xtr, self.y[train_idx], Xte, self.y[test_idx]

    def mi_order(self, fold: int) -> np.ndarray:
        if fold not in self._mi_order:
            Xtr, ytr, _, _ = self.fold_matrices(fold)
            self._mi_order[fold] = rank_features(Xtr, ytr)
        return self._mi_order[fold]

    def columns(self, fold: int, features: int | tuple[int, ...] | None) -> tuple[int, ...] | None:
        """Resolve a feature rule to concrete ascending column indices.

        A selection that covers every column collapses to ``None`` so that
        keeping all features is the same unit of work as no selection.
        """
        if features is None:
            return None
        if isinstance(features, tuple):
            cols = features
        else:
            order = self.mi_order(fold)
            if not 1 <= features <= len(order):
                raise EvaluationError(f"k={features} out of range 1..{len(order)}")
            cols = tuple(sorted(int(i) for i in order[:features]))
        if cols == tuple(range(self.X.shape[1])):
            return None
        return cols

    def resampled(self, fold: int, spec: ResamplerSpec, cols: tuple[int, ...] | None) -> ResampledSet:
        key = (fold, spec.key(), cols)
        if key not in self._resampled:
            Xtr, ytr, _, _ = self.fold_matrices(fold)
            if cols is not None:
                Xtr = Xtr[:, cols]
            rs_seed = derive_seed(self.seed, "resample", fold, spec.key(), cols)
            self._resampled[key] = resample(spec, Xtr, ytr, rs_seed)
        return self._resampled[key]

    def warm(self, requests: Iterable[tuple[int, ResamplerSpec, int | tuple[int, ...] | None]], jobs: int = 1):
        """Precompute feature selections and resampled folds for the given units."""
        resolved = []
        for fold, spec, features in requests:
            cols = self.columns(fold, features)
            resolved.append((fold, spec, cols))
        unique = list(dict.fromkeys((f, s.key(), c) for f, s, c in resolved))
        by_key = {(f, s.key(), c): s for f, s, c in resolved}
        parallel_map(
            lambda item: self.resampled(item[0], by_key[item], item[2]),
            unique,
            jobs,
        )


def fit_fold(pipeline: PipelineSpec, cache: CvCache, fold: int):
    """Train the pipeline on one training fold.

    Returns (model, cols); cols is None when all features are used.
    """
    cols = cache.columns(fold, pipeline.features)
    rs = cache.resampled(fold, pipeline.resampler, cols)
    train_seed = derive_seed(cache.seed, "train", fold, cols)
    model = train_model(pipeline.model, rs.features, rs.target, seed=train_seed)
    return model, cols


def _score_fold(pipeline: PipelineSpec, cache: CvCache, fold: int) -> float:
    try:
        model, cols = fit_fold(pipeline, cache, fold)
        _, _, Xte, yte = cache.fold_matrices(fold)
        if cols is not None:
            Xte = Xte[:, cols]
        return balanced_accuracy_score(yte, model.predict_many(Xte))
    except Exception as exc:  # noqa: BLE001 - a bad fold must not sink the run
        warnings.warn(
            f"fold {fold} failed for {pipeline.identifier()}: {exc}", RuntimeWarning
        )
        return float("nan")


def cross_validate(
    pipeline: PipelineSpec,
    X,
    y,
    folds: int = 10,
    seed: int = 0,
    jobs: int = 1,
    cache: CvCache | None = None,
) -> PipelineScore:
    """Stratified k-fold evaluation of one pipeline.

    Folds that fail to train are dropped from the aggregate with a warning;
    the returned mean is over the folds that succeeded.
    """
    if cache is None:
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0])
        splits = stratified_kfold(y, folds, seed)
        cache = CvCache(X, y, splits, seed)
    scores = parallel_map(
        lambda fold: _score_fold(pipeline, cache, fold),
        list(range(len(cache.splits))),
        jobs,
    )
    return PipelineScore(pipeline=pipeline, fold_scores=tuple(scores))


# ---------------------------------------------------------------------------
# Mutual information feature scoring


def _kth_neighbor_distance_sorted(xs: np.ndarray, k: int) -> np.ndarray:
    """k-th nearest-neighbor distance for each element of a sorted 1-D array."""
    m = len(xs)
    r = np.full(m, np.inf)
    p = np.arange(m)
    for j in range(k + 1):
        lo = p - (k - j)
        hi = p + j
        ok = (lo >= 0) & (hi <= m - 1)
        d = np.maximum(xs[p[ok]] - xs[lo[ok]], xs[hi[ok]] - xs[p[ok]])
        r[ok] = np.minimum(r[ok], d)
    return r


def _histogram_mi(x: np.ndarray, y: np.ndarray, bins: int = 32) -> float:
    """Fallback plug-in estimate over equal-frequency bins, in nats."""
    edges = np.unique(np.quantile(x, np.linspace(0, 1, bins + 1)))
    if len(edges) < 2:
        return 0.0
    cells = np.clip(np.searchsorted(edges, x, side="right") - 1, 0, len(edges) - 2)
    n = len(x)
    mi = 0.0
    for cls in np.unique(y):
        for cell in np.unique(cells):
            joint = np.sum((y == cls) & (cells == cell)) / n
            if joint == 0:
                continue
            px = np.sum(cells == cell) / n
            py = np.sum(y == cls) / n
            mi += joint * math.log(joint / (px * py))
    return max(0.0, mi)


def mutual_information(x, y, k: int = 3) -> float:
    """MI in nats between a continuous feature and a discrete binary target.

    Nearest-neighbor estimator for mixed continuous/discrete pairs: each
    point's radius is its k-th neighbor distance within its own class, and
    the count of all points inside that radius calibrates the estimate.
    Falls back to a 32-bin equal-frequency histogram when no class has two
    members.  Estimates are clamped at zero.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y)
    if x.ndim != 1:
        raise EvaluationError("x must be 1-dimensional")
    if x.shape != y.shape:
        raise EvaluationError("x and y lengths differ")
    if len(x) < 10:
        raise EvaluationError("mutual information needs at least 10 samples")
    classes, counts = np.unique(y, return_counts=True)
    if len(classes) < 2:
        raise EvaluationError("target is constant")

    usable = counts > 1
    if not usable.any():
        return _histogram_mi(x, y)

    radius = np.empty(len(x))
    k_used = np.empty(len(x))
    n_class = np.empty(len(x))
    keep = np.zeros(len(x), dtype=bool)
    for cls, count in zip(classes, counts):
        mask = y == cls
        if count < 2:
            continue
        kc = min(k, count - 1)
        order = np.argsort(x[mask], kind="stable")
        xs = x[mask][order]
        r = _kth_neighbor_distance_sorted(xs, kc)
        back = np.empty_like(order)
        back[order] = np.arange(count)
        radius[mask] = r[back]
        k_used[mask] = kc
        n_class[mask] = count
        keep[mask] = True

    xk = x[keep]
    rk = radius[keep]
    # Count the points strictly closer than each point's own-class k-th
    # neighbor (plus the point itself).  Interval endpoints computed as
    # x +/- r round away the strictness, so gather a slightly widened
    # candidate window and compare true distances against a radius nudged
    # just below r.
    strict = np.nextafter(rk, 0)
    sorted_all = np.sort(xk, kind="stable")
    pad = rk * (1.0 + 1e-9)
    hi_bound = np.nextafter(np.nextafter(xk + pad, np.inf), np.inf)
    lo_bound = np.nextafter(np.nextafter(xk - pad, -np.inf), -np.inf)
    hi = np.searchsorted(sorted_all, hi_bound, side="right")
    lo = np.searchsorted(sorted_all, lo_bound, side="left")
    lens = hi - lo
    starts = np.cumsum(lens) - lens
    seq = np.arange(int(lens.sum())) - np.repeat(starts, lens)
    owner = np.repeat(np.arange(len(xk)), lens)
    cand = sorted_all[np.repeat(lo, lens) + seq]
    inside = np.abs(cand - xk[owner]) <= strict[owner]
    m_all = np.maximum(np.bincount(owner[inside], minlength=len(xk)), 1)

    n_used = int(keep.sum())
    mi = (
        digamma(n_used)
        + float(np.mean(digamma(k_used[keep])))
        - float(np.mean(digamma(n_class[keep])))
        - float(np.mean(digamma(m_all)))
    )
    return max(0.0, float(mi))


def mi_scores(X, y, k: int = 3) -> np.ndarray:
    X = as_float_matrix(X)
    return np.array([mutual_information(X[:, j], y, k) for j in range(X.shape[1])])


def rank_features(X, y, k: int = 3) -> np.ndarray:
    """Column indices ordered by descending MI; ties go to the lower index."""
    scores = mi_scores(X, y, k)
    return np.argsort(-scores, kind="stable")


def select_k_best(X, y, k: int, mi_k: int = 3) -> np.ndarray:
    """Indices of the k features with the highest MI, best first."""
    X = as_float_matrix(X)
    if not 1 <= k <= X.shape[1]:
        raise EvaluationError(f"k={k} out of range 1..{X.shape[1]}")
    return rank_features(X, y, mi_k)[:k]


# ---------------------------------------------------------------------------
# Searches


@dataclass(frozen=True)
class GridSearchResult:
    family: str
    resampler: ResamplerSpec
    scores: tuple[PipelineScore, ...]
    best_index: int

    @property
    def best(self) -> PipelineScore:
        return self.scores[self.best_index]


def _pick_best(scores: Sequence[PipelineScore]) -> int:
    """Highest mean, then lowest error, then earliest position."""
    best = -1
    for i, sc in enumerate(scores):
        if math.isnan(sc.mean):
            continue
        if best < 0:
            best = i
            continue
        cur = scores[best]
        if sc.mean > cur.mean or (sc.mean == cur.mean and sc.error_pct < cur.error_pct):
            best = i
    if best < 0:
        raise EvaluationError("every candidate failed cross-validation")
    return best


def grid_search(
    family: str,
    resampler: ResamplerSpec,
    X,
    y,
    folds: int = 10,
    seed: int = 0,
    jobs: int = 1,
    grid: Sequence[ModelSpec] | None = None,
    features: int | tuple[int, ...] | None = None,
    cache: CvCache | None = None,
) -> GridSearchResult:
    """Evaluate a hyperparameter grid for one family over one resampler."""
    from .classifiers import default_grid

    specs = list(grid) if grid is not None else default_grid(family)
    if not specs:
        raise EvaluationError(f"empty grid for family {family}")
    if cache is None:
        X = as_float_matrix(X)
        y = as_label_vector(y, X.shape[0])
        cache = CvCache(X, y, stratified_kfold(y, folds, seed), seed)
    n_folds = len(cache.splits)
    cache.warm([(f, resampler, features) for f in range(n_folds)], jobs=jobs)

    units = [(si, f) for si in range(len(specs)) for f in range(n_folds)]
    pipelines = [PipelineSpec(resampler, spec, features) for spec in specs]
    results = parallel_map(
        lambda unit: _score_fold(pipelines[unit[0]], cache, unit[1]), units, jobs
    )
    scores = []
    for si in range(len(specs)):
        fold_scores = tuple(results[si * n_folds + f] for f in range(n_folds))
        scores.append(PipelineScore(pipeline=pipelines[si], fold_scores=fold_scores))
    return GridSearchResult(
        family=family,
        resampler=resampler,
        scores=tuple(scores),
        best_index=_pick_best(scores),
    )


@dataclass(frozen=True)
class FeatureSearchResult:
    pipeline: PipelineSpec
    scores: tuple[PipelineScore, ...]
    k_values: tuple[int, ...]
    best_index: int

    @property
    def best(self) -> PipelineScore:
        return self.scores[self.best_index]

    @property
    def best_k(self) -> int:
        return self.k_values[self.best_index]


def feature_grid_search(
    resampler: ResamplerSpec,
    model: ModelSpec,
    X,
    y,
    k_min: int = 5,
    folds: int = 10,
    seed: int = 0,
    jobs: int = 1,
    cache: CvCache | None = None,
    k_values: Sequence[int] | None = None,
) -> FeatureSearchResult:
    """Sweep the selected-feature count from k_min up to all features.

    Best k wins by mean, then lower error, then fewer features.
    """
    X = as_float_matrix(X)
    y = as_label_vector(y, X.shape[0])
    d = X.shape[1]
    if k_values is None:
        if not 1 <= k_min <= d:
            raise EvaluationError(f"k_min={k_min} out of range 1..{d}")
        k_values = list(range(k_min, d + 1))
    else:
        k_values = list(k_values)
    if cache is None:
        cache = CvCache(X, y, stratified_kfold(y, folds, seed), seed)
    n_folds = len(cache.splits)
    cache.warm([(f, resampler, k) for k in k_values for f in range(n_folds)], jobs=jobs)

    units = [(ki, f) for ki in range(len(k_values)) for f in range(n_folds)]
    pipelines = [PipelineSpec(resampler, model, k) for k in k_values]
    results = parallel_map(
        lambda unit: _score_fold(pipelines[unit[0]], cache, unit[1]), units, jobs
    )
    scores = []
    for ki in range(len(k_values)):
        fold_scores = tuple(results[ki * n_folds + f] for f in range(n_folds))
        scores.append(PipelineScore(pipeline=pipelines[ki], fold_scores=fold_scores))
    best = _pick_best(scores)
    return FeatureSearchResult(
        pipeline=pipelines[best],
        scores=tuple(scores),
        k_values=tuple(k_values),
        best_index=best,
    )
